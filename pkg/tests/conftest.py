"""Shared fixtures: the running kinematic points used across the suite."""

import os
import sys
from fractions import Fraction

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

import kinematics  # noqa: E402


@pytest.fixture
def data_dir():
    return os.path.join(ROOT, 'data')


@pytest.fixture
def e1():
    """Bubble with p = (1,0), (-1,0) and unit masses"""
    return kinematics.from_invariants(2, [[1, -1], [-1, 1]], [1, 1])


@pytest.fixture
def tadpole():
    return kinematics.from_invariants(1, [[0]], [1])


@pytest.fixture
def equilateral():
    """Three planar momenta with p_i^2 = 2, p_i.p_j = -1 and unit masses"""
    return kinematics.from_invariants(3, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], [1, 1, 1])


@pytest.fixture
def degenerate():
    """Zero momenta, equal masses: G_{1,2} vanishes"""
    return kinematics.from_invariants(2, [[0, 0], [0, 0]], [1, 1])


@pytest.fixture
def e1_heavy():
    """E1 momenta with m_1^2 = 2"""
    return kinematics.from_invariants(2, [[1, -1], [-1, 1]], [Fraction(2), Fraction(1)])
