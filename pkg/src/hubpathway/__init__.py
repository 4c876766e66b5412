"""Hub-pathway transfer learning: route each input through the top-k most
relevant pretrained experts, aggregate their outputs, and train gate,
aggregator and experts under a dual objective."""

from .diffcore import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
