from .config import DeploymentPlan, load_plan
from .supervisor import Supervisor

__all__ = ["DeploymentPlan", "load_plan", "Supervisor"]
