#ifndef SFG_BOUNDS_HPP
#define SFG_BOUNDS_HPP

#include <map>
#include <string>
#include <vector>

#include "schedule.hpp"

namespace sfg {

// An axis-aligned integer box, one (min, extent) pair per dimension.
struct IntervalBox {
    std::vector<int64_t> min;
    std::vector<int64_t> extent;

    int dims() const { return int(min.size()); }
    int64_t hi(int d) const { return min[d] + extent[d] - 1; }
    int64_t volume() const {
        int64_t v = 1;
        for (auto e : extent) v *= e;
        return v;
    }
    bool contains(const std::vector<int64_t> &pt) const;
    std::string str() const;
    bool operator==(const IntervalBox &o) const { return min == o.min && extent == o.extent; }
};

// The shape of one consumer's accesses into a producer, per producer dim:
// window extent, advance per consumer step, and the window origin offset
// relative to the consumer's position (anchored at the minimum access).
struct StencilFootprint {
    std::vector<int64_t> window;
    std::vector<int64_t> step;
    std::vector<int64_t> origin;

    int dims() const { return int(window.size()); }
    std::string str() const;
};

struct Bounds {
    // boxes for scope members, scope inputs and auxiliary const funcs
    std::map<std::string, IntervalBox> boxes;

    const IntervalBox &box(const std::string &f) const {
        auto it = boxes.find(f);
        SFG_INTERNAL_ASSERT(it != boxes.end());
        return it->second;
    }
};

// Works backward from the output tile: the output box is the tile, every
// producer box covers the union of its consumers' footprints swept over the
// consumer boxes. All boxes come out constant. Also fills
// scope.intra_extents (extents of leading, non-scan dims per member).
Bounds infer_bounds(AcceleratedScope &scope, const ScheduledProgram &sp);

// Footprint of `consumer`'s accesses into `producer` (both in scope).
StencilFootprint consumer_footprint(const ScheduledProgram &sp, const AcceleratedScope &scope,
                                    const Bounds &bounds, const std::string &consumer,
                                    const std::string &producer);

// Per-dim max of consumer windows (aligned at the minimum origin) and min of
// consumer steps: the stream the producer's line buffer must serve.
StencilFootprint union_output_stencil(const ScheduledProgram &sp, const AcceleratedScope &scope,
                                      const Bounds &bounds, const std::string &producer,
                                      const std::vector<std::string> &consumers);

// Whole-program variant used by the reference interpreter: boxes for every
// func and input needed to produce `output_box` of the program's output.
std::map<std::string, IntervalBox> infer_program_boxes(const TypedProgram &tp,
                                                       const IntervalBox &output_box);

// Extent of a leading (non-scan) dim of f, derived from identity pass-through
// into declared input dims or from bounded update store indices; -1 if unknown.
int64_t forward_leading_extent(const TypedProgram &tp, const std::string &f, int dim);

}  // namespace sfg

#endif
