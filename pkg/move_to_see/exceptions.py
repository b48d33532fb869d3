class MoveToSeeError(Exception):
	"""Base class for every error raised by this package."""


class ConfigurationError(MoveToSeeError, ValueError):
	"""A configuration record or a call parameter violates its contract."""


class IKFailure(MoveToSeeError):
	"""Inverse kinematics did not reach the requested pose.

	`residual` is the remaining position error in meters and `q` the last
	joint configuration the solver visited.
	"""

	def __init__(self, message: str, residual: float, q=None):
		super().__init__(message)
		self.message = message
		self.residual = residual
		self.q = q
