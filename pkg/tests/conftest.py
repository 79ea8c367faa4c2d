import pytest

from keydyn import AgentProfile, keyboard_model


@pytest.fixture
def geometry():
    from keydyn import default_geometry
    return default_geometry()


def make_profile(agent_id=1, wpm=40.0, error_rate=0.0, fatigue_factor=0.0,
                 finger_agility=1.0, dominant_hand="right", keyboard="mechanical"):
    """Profile with neutral defaults so single factors can be isolated."""
    return AgentProfile(
        agent_id=agent_id,
        wpm=wpm,
        error_rate=error_rate,
        fatigue_factor=fatigue_factor,
        finger_agility=finger_agility,
        dominant_hand=dominant_hand,
        keyboard=keyboard_model(keyboard) if keyboard else None,
    )


class PinnedRng:
    """Stand-in random stream with fixed outputs, for arithmetic checks."""

    def __init__(self, normal_value=None, uniform_value=0.5):
        self.normal_value = normal_value
        self.uniform_value = uniform_value

    def normal(self, loc=0.0, scale=1.0):
        return loc if self.normal_value is None else self.normal_value

    def random(self):
        return self.uniform_value

    def integers(self, n):
        return 0
