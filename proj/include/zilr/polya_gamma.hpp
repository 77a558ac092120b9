#pragma once

#include "zilr/rng.hpp"

namespace zilr {

/// E[PG(b, c)] = b / (2c) * tanh(c / 2), with the limit b / 4 at c = 0.
double pg_mean(double b, double c);

/// Mean of the terms k > trunc of the gamma-series representation,
///   (b / 2 pi^2) * sum_{k > trunc} 1 / ((k - 1/2)^2 + c^2 / (4 pi^2)).
double pg_tail_mean(double b, double c, int trunc);

/// Draw from PG(b, c) as
///   (1 / 2 pi^2) * sum_{k=1}^{trunc} v_k / ((k - 1/2)^2 + c^2 / (4 pi^2)),
///   v_k ~ Gamma(b, 1),
/// plus the deterministic tail mean for k > trunc.  Requires b > 0, trunc >= 1.
double sample_pg(double b, double c, int trunc, Rng& rng);

}  // namespace zilr
