#include "genlink/metrics.hpp"

#include <cmath>

namespace genlink {

double mcc(const Confusion& c) {
    double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
    double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
    double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

double precision(const Confusion& c) {
    return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const Confusion& c) {
    return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(const Confusion& c) {
    double p = precision(c), r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace genlink
