#include "rplan/ts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "rplan/errors.hpp"

namespace rplan {

static constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// construction

uint32_t TransitionSystem::add_states(uint32_t count) {
    auto first = static_cast<uint32_t>(labels_.size());
    labels_.resize(labels_.size() + count);
    return first;
}

void TransitionSystem::set_label(uint32_t x, Symbol s) {
    if (x >= labels_.size())
        throw DimensionError("label for state " + std::to_string(x) + " out of range");
    labels_[x] = s;
}

void TransitionSystem::set_initial(uint32_t x) {
    if (x >= labels_.size())
        throw DimensionError("initial state " + std::to_string(x) + " out of range");
    initial_ = x;
}

void TransitionSystem::add_edge(uint32_t src, uint32_t dst, double weight) {
    if (src >= labels_.size() || dst >= labels_.size())
        throw DimensionError("edge " + std::to_string(src) + "->" + std::to_string(dst) +
                             " out of range");
    if (weight < 0.0)
        throw NegativeWeightError("negative weight on edge " + std::to_string(src) + "->" +
                                  std::to_string(dst));
    raw_.emplace_back(src, dst, weight);
}

void TransitionSystem::finalize() {
    if (finalized_)
        return;
    const uint32_t n = num_states();
    if (n == 0)
        throw DimensionError("transition system has no states");

    // Waiting in place is always allowed and free; heavier parallel edges
    // (self-loop or not) are dominated and dropped.
    for (uint32_t x = 0; x < n; ++x)
        raw_.emplace_back(x, x, 0.0);
    std::sort(raw_.begin(), raw_.end());
    std::vector<std::tuple<uint32_t, uint32_t, double>> dedup;
    dedup.reserve(raw_.size());
    for (const auto& e : raw_)
        if (dedup.empty() || std::get<0>(dedup.back()) != std::get<0>(e) ||
            std::get<1>(dedup.back()) != std::get<1>(e))
            dedup.push_back(e);
    raw_ = std::move(dedup);

    offs_.assign(n + 1, 0);
    roffs_.assign(n + 1, 0);
    for (const auto& [src, dst, w] : raw_) {
        ++offs_[src + 1];
        ++roffs_[dst + 1];
    }
    for (uint32_t x = 0; x < n; ++x) {
        offs_[x + 1] += offs_[x];
        roffs_[x + 1] += roffs_[x];
    }
    edges_.resize(raw_.size());
    redges_.resize(raw_.size());
    std::vector<uint32_t> pos(offs_.begin(), offs_.end() - 1);
    std::vector<uint32_t> rpos(roffs_.begin(), roffs_.end() - 1);
    for (const auto& [src, dst, w] : raw_) {
        edges_[pos[src]++] = TsEdge{dst, w};
        redges_[rpos[dst]++] = TsEdge{src, w};
    }
    raw_.clear();
    raw_.shrink_to_fit();

    distinct_.assign(labels_.begin(), labels_.end());
    std::sort(distinct_.begin(), distinct_.end());
    distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
    label_class_.resize(n);
    for (uint32_t x = 0; x < n; ++x)
        label_class_[x] = static_cast<uint32_t>(
            std::lower_bound(distinct_.begin(), distinct_.end(), labels_[x]) - distinct_.begin());
    finalized_ = true;
}

double TransitionSystem::edge_weight(uint32_t src, uint32_t dst) const {
    auto edges = out(src);
    auto it = std::lower_bound(edges.begin(), edges.end(), dst,
                               [](const TsEdge& e, uint32_t d) { return e.dst < d; });
    if (it == edges.end() || it->dst != dst)
        throw InvalidTrajectoryError("no edge " + std::to_string(src) + "->" +
                                     std::to_string(dst));
    return it->weight;
}

TransitionSystem make_grid(uint32_t rows, uint32_t cols, std::span<const GridLabel> labels,
                           double edge_weight) {
    if (rows == 0 || cols == 0)
        throw DimensionError("grid must have at least one row and column");
    if (edge_weight < 0.0)
        throw NegativeWeightError("negative grid edge weight");
    TransitionSystem ts;
    ts.add_states(rows * cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            uint32_t id = r * cols + c;
            if (c + 1 < cols) {
                ts.add_edge(id, id + 1, edge_weight);
                ts.add_edge(id + 1, id, edge_weight);
            }
            if (r + 1 < rows) {
                ts.add_edge(id, id + cols, edge_weight);
                ts.add_edge(id + cols, id, edge_weight);
            }
        }
    for (const GridLabel& gl : labels) {
        if (gl.row >= rows || gl.col >= cols)
            throw DimensionError("label cell (" + std::to_string(gl.row) + "," +
                                 std::to_string(gl.col) + ") outside " + std::to_string(rows) +
                                 "x" + std::to_string(cols) + " grid");
        ts.set_label(gl.row * cols + gl.col, gl.label);
    }
    ts.set_initial(0);
    ts.finalize();
    return ts;
}

// ---------------------------------------------------------------------------
// file formats

namespace {

struct RawGraph {
    std::vector<std::tuple<uint32_t, uint32_t, double>> edges;
    std::vector<std::pair<uint32_t, Symbol>> labels;
    uint32_t initial = 0;
    bool saw_initial = false;
    uint32_t max_id = 0;
    bool any = false;

    void see(uint32_t id) {
        max_id = std::max(max_id, id);
        any = true;
    }

    TransitionSystem build() const {
        if (!any)
            throw ParseError("graph file declares no states");
        TransitionSystem ts;
        ts.add_states(max_id + 1);
        for (const auto& [src, dst, w] : edges)
            ts.add_edge(src, dst, w);
        for (const auto& [id, sym] : labels)
            ts.set_label(id, sym);
        ts.set_initial(saw_initial ? initial : 0);
        ts.finalize();
        return ts;
    }
};

uint32_t parse_id(std::string_view tok, size_t line_no) {
    uint32_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad state id '" +
                         std::string(tok) + "'");
    return v;
}

double parse_weight(std::string_view tok, size_t line_no) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad weight '" +
                         std::string(tok) + "'");
    if (v < 0.0)
        throw NegativeWeightError("line " + std::to_string(line_no) + ": negative weight " +
                                  std::string(tok));
    return v;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

TransitionSystem load_csv(ApInterner& aps, std::istream& in) {
    RawGraph g;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trimmed(line);
        if (sv.empty() || sv.front() == '#')
            continue;
        if (sv.starts_with("initial:")) {
            g.initial = parse_id(trimmed(sv.substr(8)), line_no);
            g.saw_initial = true;
            g.see(g.initial);
            continue;
        }
        if (sv.starts_with("labels:")) {
            std::istringstream entries{std::string(sv.substr(7))};
            std::string entry;
            while (entries >> entry) {
                size_t eq = entry.find('=');
                if (eq == std::string::npos)
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": label entry needs id=ap;... form");
                uint32_t id = parse_id(entry.substr(0, eq), line_no);
                g.labels.emplace_back(id, aps.intern_set(entry.substr(eq + 1)));
                g.see(id);
            }
            continue;
        }
        size_t c1 = sv.find(',');
        size_t c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
        if (c2 == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'src,dst,weight'");
        uint32_t src = parse_id(trimmed(sv.substr(0, c1)), line_no);
        uint32_t dst = parse_id(trimmed(sv.substr(c1 + 1, c2 - c1 - 1)), line_no);
        double w = parse_weight(trimmed(sv.substr(c2 + 1)), line_no);
        g.edges.emplace_back(src, dst, w);
        g.see(src);
        g.see(dst);
    }
    return g.build();
}

TransitionSystem load_json(ApInterner& aps, std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    RawGraph g;
    try {
        if (j.contains("states"))
            for (const auto& s : j.at("states")) {
                uint32_t id = s.at("id").get<uint32_t>();
                g.see(id);
                if (s.contains("labels")) {
                    Symbol sym;
                    for (const auto& name : s.at("labels"))
                        sym = sym.with(aps.intern(name.get<std::string>()));
                    g.labels.emplace_back(id, sym);
                }
            }
        for (const auto& e : j.at("edges")) {
            uint32_t src = e.at("src").get<uint32_t>();
            uint32_t dst = e.at("dst").get<uint32_t>();
            double w = e.at("w").get<double>();
            if (w < 0.0)
                throw NegativeWeightError("negative weight on edge " + std::to_string(src) +
                                          "->" + std::to_string(dst));
            g.edges.emplace_back(src, dst, w);
            g.see(src);
            g.see(dst);
        }
        if (j.contains("initial")) {
            g.initial = j.at("initial").get<uint32_t>();
            g.saw_initial = true;
            g.see(g.initial);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad graph JSON shape: ") + e.what());
    }
    return g.build();
}

std::string format_weight(double w) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, w);
    (void)ec;
    return std::string(buf, p);
}

std::vector<std::string> sorted_names(const ApInterner& aps, Symbol s) {
    std::vector<std::string> names;
    for (ApId a : s.aps())
        names.push_back(aps.name(a));
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace

TransitionSystem load_graph(ApInterner& aps, std::istream& in, GraphFormat format) {
    return format == GraphFormat::EdgeListCsv ? load_csv(aps, in) : load_json(aps, in);
}

TransitionSystem load_graph(ApInterner& aps, const std::string& path, GraphFormat format) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open graph file: " + path);
    return load_graph(aps, in, format);
}

void save_graph(const TransitionSystem& ts, const ApInterner& aps, std::ostream& out,
                GraphFormat format) {
    if (format == GraphFormat::EdgeListCsv) {
        out << "initial: " << ts.initial() << "\n";
        for (uint32_t x = 0; x < ts.num_states(); ++x)
            for (const TsEdge& e : ts.out(x)) {
                if (e.dst == x && e.weight == 0.0)
                    continue; // implied self-loop
                out << x << "," << e.dst << "," << format_weight(e.weight) << "\n";
            }
        for (uint32_t x = 0; x < ts.num_states(); ++x) {
            Symbol s = ts.label(x);
            if (s.empty())
                continue;
            out << "labels: " << x << "=";
            auto names = sorted_names(aps, s);
            for (size_t i = 0; i < names.size(); ++i)
                out << (i ? ";" : "") << names[i];
            out << "\n";
        }
        return;
    }
    nlohmann::json j;
    j["initial"] = ts.initial();
    j["states"] = nlohmann::json::array();
    for (uint32_t x = 0; x < ts.num_states(); ++x) {
        nlohmann::json s;
        s["id"] = x;
        if (!ts.label(x).empty())
            s["labels"] = sorted_names(aps, ts.label(x));
        j["states"].push_back(std::move(s));
    }
    j["edges"] = nlohmann::json::array();
    for (uint32_t x = 0; x < ts.num_states(); ++x)
        for (const TsEdge& e : ts.out(x)) {
            if (e.dst == x && e.weight == 0.0)
                continue;
            j["edges"].push_back({{"src", x}, {"dst", e.dst}, {"w", e.weight}});
        }
    out << j.dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// queries

std::vector<Symbol> output_word(const TransitionSystem& ts,
                                std::span<const uint32_t> trajectory) {
    if (trajectory.empty())
        throw InvalidTrajectoryError("empty trajectory");
    std::vector<Symbol> word;
    word.reserve(trajectory.size());
    word.push_back(ts.label(trajectory[0]));
    for (size_t i = 1; i < trajectory.size(); ++i) {
        ts.edge_weight(trajectory[i - 1], trajectory[i]); // throws on non-edge
        word.push_back(ts.label(trajectory[i]));
    }
    return word;
}

double trajectory_weight(const TransitionSystem& ts, std::span<const uint32_t> trajectory) {
    if (trajectory.empty())
        throw InvalidTrajectoryError("empty trajectory");
    double total = 0.0;
    for (size_t i = 1; i < trajectory.size(); ++i)
        total += ts.edge_weight(trajectory[i - 1], trajectory[i]);
    return total;
}

std::vector<double> multi_source_distance(const TransitionSystem& ts,
                                          std::span<const uint32_t> targets) {
    std::vector<double> dist(ts.num_states(), kInf);
    using Item = std::pair<double, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (uint32_t t : targets) {
        if (t >= ts.num_states())
            throw DimensionError("distance target " + std::to_string(t) + " out of range");
        if (dist[t] > 0.0) {
            dist[t] = 0.0;
            heap.emplace(0.0, t);
        }
    }
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d > dist[x])
            continue;
        for (const TsEdge& e : ts.in(x)) {
            double nd = d + e.weight;
            if (nd < dist[e.dst]) {
                dist[e.dst] = nd;
                heap.emplace(nd, e.dst);
            }
        }
    }
    return dist;
}

} // namespace rplan
