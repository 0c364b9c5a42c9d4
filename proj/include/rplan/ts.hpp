#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rplan/ap.hpp"

namespace rplan {

struct TsEdge {
    uint32_t dst = 0;
    double weight = 0.0;
};

/* Weighted directed graph whose states carry label sets (possibly empty).
   Every state gets a zero-weight self-loop at finalize() so a plan may wait
   in place; the label of a state is emitted each time the state is visited.

   Mutation happens before finalize(); afterwards the structure is immutable
   and all read paths are safe to share across threads. */
class TransitionSystem {
public:
    uint32_t add_states(uint32_t count);
    void set_label(uint32_t x, Symbol s);
    void set_initial(uint32_t x);
    void add_edge(uint32_t src, uint32_t dst, double weight); // NegativeWeightError

    /* Deduplicates parallel edges keeping the cheapest, inserts missing
       zero-weight self-loops, and freezes adjacency. */
    void finalize();

    [[nodiscard]] bool finalized() const { return finalized_; }
    [[nodiscard]] uint32_t num_states() const { return static_cast<uint32_t>(labels_.size()); }
    [[nodiscard]] size_t num_edges() const { return edges_.size(); }
    [[nodiscard]] uint32_t initial() const { return initial_; }
    [[nodiscard]] Symbol label(uint32_t x) const { return labels_[x]; }

    [[nodiscard]] std::span<const TsEdge> out(uint32_t x) const {
        return {edges_.data() + offs_[x], offs_[x + 1] - offs_[x]};
    }
    [[nodiscard]] std::span<const TsEdge> in(uint32_t x) const {
        return {redges_.data() + roffs_[x], roffs_[x + 1] - roffs_[x]};
    }

    // Weight of the cheapest src->dst edge; InvalidTrajectoryError if absent.
    [[nodiscard]] double edge_weight(uint32_t src, uint32_t dst) const;

    // Distinct label sets and each state's index into them (dense, stable).
    [[nodiscard]] const std::vector<Symbol>& distinct_labels() const { return distinct_; }
    [[nodiscard]] uint32_t label_class(uint32_t x) const { return label_class_[x]; }

private:
    bool finalized_ = false;
    uint32_t initial_ = 0;
    std::vector<Symbol> labels_;
    std::vector<std::tuple<uint32_t, uint32_t, double>> raw_; // pre-finalize edges
    std::vector<uint32_t> offs_, roffs_;
    std::vector<TsEdge> edges_, redges_;
    std::vector<Symbol> distinct_;
    std::vector<uint32_t> label_class_;
};

struct GridLabel {
    uint32_t row = 0;
    uint32_t col = 0;
    Symbol label;
};

/* rows x cols grid, 4-connected, uniform edge weight, initial state at
   (0,0); state id of (r,c) is r*cols + c.  DimensionError on empty grids,
   out-of-range label cells, or a negative weight. */
TransitionSystem make_grid(uint32_t rows, uint32_t cols, std::span<const GridLabel> labels,
                           double edge_weight = 1.0);

enum class GraphFormat { EdgeListCsv, Json };

/* CSV edge lists: one "src,dst,weight" line per edge, '#' comment lines,
   an optional "initial: <id>" line, and label trailer lines of the form
   "labels: <id>=<ap>[;<ap>...] ...".  States are 0..max mentioned id.
   JSON: {"states":[{"id":..,"labels":[..]},..],"initial":..,
          "edges":[{"src":..,"dst":..,"w":..},..]}. */
TransitionSystem load_graph(ApInterner& aps, std::istream& in, GraphFormat format);
TransitionSystem load_graph(ApInterner& aps, const std::string& path, GraphFormat format);

// Canonical serialization: loading back and saving again is byte-identical.
void save_graph(const TransitionSystem& ts, const ApInterner& aps, std::ostream& out,
                GraphFormat format);

// The word a state sequence generates (one label per visited state,
// including the first).  InvalidTrajectoryError on a non-edge step.
std::vector<Symbol> output_word(const TransitionSystem& ts, std::span<const uint32_t> trajectory);

// Sum of edge weights along the sequence; InvalidTrajectoryError on a non-edge.
double trajectory_weight(const TransitionSystem& ts, std::span<const uint32_t> trajectory);

/* Cheapest-path distance from every state to the nearest target, following
   edge directions (computed on the reversed graph).  Unreachable: +inf. */
std::vector<double> multi_source_distance(const TransitionSystem& ts,
                                          std::span<const uint32_t> targets);

} // namespace rplan
