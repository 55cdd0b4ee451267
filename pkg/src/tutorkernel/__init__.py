"""Tutoring-platform kernel: snapshot store, sandboxed judge, feedback plugins,
service discovery, least-connected load balancing and streak-based auto-scaling."""

__version__ = "0.1.0"
