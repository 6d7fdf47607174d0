from .pricing import *
from .riders import *
from .engine import *
