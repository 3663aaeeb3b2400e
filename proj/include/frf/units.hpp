// units.hpp: conversion between internal units (gamma = 1) and lab units

#pragma once

namespace frf::units {

/// Reduced Planck constant in ueV * ps.
inline constexpr double hbar_ueV_ps = 658.2119569;

/// Time in units of 1/gamma -> picoseconds, for gamma given as an energy in ueV.
inline constexpr double to_ps(double t_over_gamma, double gamma_ueV) { return t_over_gamma * hbar_ueV_ps / gamma_ueV; }

inline constexpr double from_ps(double t_ps, double gamma_ueV) { return t_ps * gamma_ueV / hbar_ueV_ps; }

/// Energy in units of gamma -> ueV.
inline constexpr double to_ueV(double e_over_gamma, double gamma_ueV) { return e_over_gamma * gamma_ueV; }

inline constexpr double from_ueV(double e_ueV, double gamma_ueV) { return e_ueV / gamma_ueV; }

inline constexpr double neV_per_ueV = 1e3;

} // namespace frf::units
