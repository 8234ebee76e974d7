#pragma once

#include <vector>

namespace lfk {

struct TraceEntry {
    double t;
    double mass;      // integrate(u)
    double linf;      // ||u||_inf
    double l2;        // ||u||_2
    double absorbed;  // running integral of u^p in space-time
    double clamped;   // cumulative mass removed by clamping
    double dt;        // step size in effect when the entry was recorded
};

using MassTrace = std::vector<TraceEntry>;

}  // namespace lfk
