"""Bundled count series."""

from importlib import resources

from ..series import CountSeries, parse_counts_csv

LIGHT_PAST = "light_past_synthetic.csv"


def light_past() -> CountSeries:
    """Synthetic stand-in for the yearly lit/lighted counts: 8869 tokens, 1810-2009.

    Built by ``scripts/make_light_fixture.py`` so that quantile binning with
    c=1 gives the published first, second and last bins.
    """
    text = resources.files(__package__).joinpath(LIGHT_PAST).read_text(encoding="utf-8")
    return parse_counts_csv(text, label_a="regular", label_b="irregular")
