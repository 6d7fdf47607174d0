from surgesim_test import *
