from .test_dataset import *
from .test_enhance_bridge import *
from .test_eval_iou import *
from .test_harmonize import *
from .test_lowres_sim import *
from .test_pairgen import *
