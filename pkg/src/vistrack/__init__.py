from vistrack import checks  # noqa
from vistrack.config import *  # noqa
from vistrack.exceptions import *  # noqa
from vistrack.formats import *  # noqa
from vistrack.geometry import *  # noqa
from vistrack.kalman import *  # noqa
from vistrack.metadata import *  # noqa
from vistrack.metrics import *  # noqa
from vistrack.particles import *  # noqa
from vistrack.pipeline import *  # noqa
from vistrack.simulator import *  # noqa
from vistrack.tracks import *  # noqa
