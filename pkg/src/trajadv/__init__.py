"""Trajectory advancement along a parametric reference under helpful interaction wrenches."""
