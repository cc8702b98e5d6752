#pragma once

#include "golap/algebra.hpp"
#include "golap/dataset.hpp"
#include "golap/query.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace golap::testing {

using Rng = std::mt19937_64;

/// The FIX1 constellation shipped under data/fix1.
const Dataset& fix1();

struct ConstellationLimits {
   std::size_t max_dimensions = 5;
   std::size_t max_hierarchies = 3;
   std::size_t max_parameters = 3;
   std::size_t max_fact_rows = 200;
   std::size_t max_instances = 12;
};

/// Random valid constellation with instances. Measures are multiples of 0.25
/// so that sums are exact in binary floating point.
std::shared_ptr<const Dataset> random_dataset(Rng& rng, const ConstellationLimits& limits = {});

/// A random DISPLAY over `ds` that satisfies every precondition.
DisplaySpec random_display(Rng& rng, const Dataset& ds);

/// A random operation for `t`. Arguments are drawn from the table's state so
/// most operations are applicable; with probability `noise` one argument is
/// replaced by something arbitrary.
Operation random_operation(Rng& rng, const TM& t, const Dataset& ds, double noise = 0.1);

/// A random restriction over the fact of `t`, literals drawn from the data.
Predicate random_predicate(Rng& rng, const TM& t, const Dataset& ds);

/// A table reached by a random DISPLAY followed by up to `steps` applicable
/// operations (failing ones are dropped).
TM random_table(Rng& rng, const Algebra& algebra, std::size_t steps);

/// A random well-formed expression tree with syntactically arbitrary names,
/// for parser round trips.
Expr random_expression(Rng& rng, int depth);

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
   return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
   return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

} // namespace golap::testing
