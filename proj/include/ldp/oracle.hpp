#pragma once

namespace ldp {

/// Exact reference probabilities for the unit-intensity epoch model
/// (X ~ Exp(1), Y | X ~ Poisson(X)). The reward sum W(x) is a Poisson count
/// over the closed epochs, whose total length is distributed as (x - X) v 0,
/// so Pr{W(x) >= m} is an exponential mixture of Poisson tails.
double unit_epoch_exact_tail(double c, double x);

/// Pr{V(x) >= ceil(c x)} for the plain Poisson count V(x) ~ Poisson(x).
double unit_poisson_count_tail(double c, double x);

}  // namespace ldp
