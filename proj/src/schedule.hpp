#ifndef SFG_SCHEDULE_HPP
#define SFG_SCHEDULE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "typecheck.hpp"

namespace sfg {

// One loop in a function's (conceptual) loop nest, outermost first.
struct LoopDim {
    std::string var;
    std::string origin;       // the coordinate variable this loop derives from
    int64_t extent = 0;       // 0 = sized by the domain, >0 = fixed by split/tile
    bool unrolled = false;
    int unroll_factor = 1;
    bool parallel = false;
};

struct AcceleratedScope {
    std::string output;
    std::vector<std::string> inputs;    // streamed sources (raw inputs or host funcs)
    std::vector<std::string> members;   // funcs on input->output paths, topo order
    std::vector<std::string> aux_funcs; // constant helpers (ROM / inline candidates)
    int64_t tile_x = 0, tile_y = 0;
    std::string inner_var, block_var;
    std::set<std::string> linebuffered;
    std::map<std::string, std::map<std::string, int>> unrolls;  // func -> var -> factor
    std::map<std::pair<std::string, std::string>, int64_t> fifo_overrides;
    bool parallel_tiles = false;

    // Per-member granule: output positions advanced along x per firing.
    std::map<std::string, int> stride;
    // Filled by bounds inference: extents of the non-scan (leading) dims.
    std::map<std::string, std::vector<int64_t>> intra_extents;

    bool is_member(const std::string &f) const {
        for (const auto &m : members) {
            if (m == f) return true;
        }
        return false;
    }
    bool is_scope_input(const std::string &f) const {
        for (const auto &m : inputs) {
            if (m == f) return true;
        }
        return false;
    }
    int stride_of(const std::string &f) const {
        auto it = stride.find(f);
        return it == stride.end() ? 1 : it->second;
    }
    int unroll_of(const std::string &f, const std::string &var) const;
};

struct ScheduledProgram {
    TypedProgram typed;
    std::map<std::string, std::vector<LoopDim>> loops;  // per func, outermost first
    bool has_accelerate = false;
    AcceleratedScope scope;

    const FuncDef &func(const std::string &name) const { return typed.func(name); }
};

// Validates the directive list against the program and resolves the
// accelerated scope (members, tile extents, stride, buffering and rates).
ScheduledProgram apply_schedule(const TypedProgram &p, const std::vector<Directive> &directives);

inline ScheduledProgram apply_schedule(const TypedProgram &p) {
    return apply_schedule(p, p.prog.directives);
}

// Scheduled throughput of one member: positions produced per firing over
// sequential iterations per firing, as an exact rational. Requires bounds
// inference to have filled scope.intra_extents.
Rational scope_rate(const AcceleratedScope &scope, const ScheduledProgram &sp,
                    const std::string &f);

// Sequential cycles one firing of func f takes after loop perfection:
// the sum of its >1-extent sequential loop segments, floor 1.
int64_t sequential_iterations(const AcceleratedScope &scope, const ScheduledProgram &sp,
                              const std::string &f);

// min over members of scope_rate: the pipeline's scheduled throughput.
Rational pipeline_scheduled_rate(const AcceleratedScope &scope, const ScheduledProgram &sp);

}  // namespace sfg

#endif
