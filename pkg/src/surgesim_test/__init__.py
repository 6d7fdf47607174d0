from .fixtures import *
from .infra import *
