from .scenario import *
from .artifact import *
from .runner import *
