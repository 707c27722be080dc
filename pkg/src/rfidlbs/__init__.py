"""Indoor location-based services over a simulated passive-RFID radio layer."""

__version__ = "0.1.0"
