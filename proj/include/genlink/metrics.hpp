#pragma once

#include <cstddef>

namespace genlink {

struct Confusion {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

/// Matthews correlation coefficient; 0 when any marginal sum is zero.
double mcc(const Confusion& c);

double precision(const Confusion& c);
double recall(const Confusion& c);
double f1(const Confusion& c);

}  // namespace genlink
