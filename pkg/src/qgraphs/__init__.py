"""q-graphs: symmetric incidence structures of 1- and 2-spaces over finite fields."""

__version__ = "0.1.0"
