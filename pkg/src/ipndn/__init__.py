"""IP over NDN gateway with a minimal NDN forwarding core and simulator."""

__version__ = "0.1.0"
