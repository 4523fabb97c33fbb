from .test_event import *
from .test_object import *
from .test_resample import *
from .test_settings import *
from .test_tiler import *
