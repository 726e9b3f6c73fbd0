#include "jigsaw/crossover.hpp"

#include <algorithm>
#include <stdexcept>

namespace jigsaw {

namespace {

constexpr std::array<Side, 4> kSides = {Side::Top, Side::Right, Side::Bottom, Side::Left};

std::int32_t encode(const Placement& p) {
    return p.piece * 8 + p.rotation * 2 + static_cast<int>(p.face);
}

Placement decode(std::int32_t code) {
    return {code / 8, static_cast<std::uint8_t>((code / 2) % 4), static_cast<Face>(code % 2)};
}

// Min-heap on (weight, to, from).
bool heap_after(const auto& a, const auto& b) {
    if (a.weight != b.weight) {
        return a.weight > b.weight;
    }
    if (a.to != b.to) {
        return a.to > b.to;
    }
    return a.from > b.from;
}

}  // namespace

std::vector<Relation> parent_relation_set(const Chromosome& parent, const EdgeIndexer& indexer) {
    std::vector<Relation> out;
    for (const Relation& r : adjacency_relations(parent)) {
        if (indexer.labels() == 8) {
            const Relation other = r.other_side();
            out.push_back(indexer.key(other) < indexer.key(r) ? other : r);
        } else {
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ParentRelations::ParentRelations(const Chromosome& parent, const EdgeIndexer& indexer)
    : partner_(static_cast<std::size_t>(indexer.edge_count()), -1) {
    const auto link = [&](const Relation& r) {
        const int a = indexer.index(r.first);
        const int b = indexer.index(r.second);
        partner_[static_cast<std::size_t>(a)] = b;
        partner_[static_cast<std::size_t>(b)] = a;
    };
    for (const Relation& r : adjacency_relations(parent)) {
        link(r);
        if (indexer.labels() == 8) {
            link(r.other_side());
        }
    }
}

CandidateIndex::CandidateIndex(const CompatibilityTable& table) : table_(&table) {
    const EdgeIndexer& ix = table.indexer();
    const int count = ix.edge_count();
    std::vector<std::pair<double, std::int32_t>> row;
    row.reserve(static_cast<std::size_t>(count));
    for (int e = 0; e < count; ++e) {
        row.clear();
        const PieceEdge pe = ix.edge(e);
        for (int f = 0; f < count; ++f) {
            const PieceEdge qe = ix.edge(f);
            if (qe.piece != pe.piece && legal_pair(table.type(), pe.edge, qe.edge)) {
                row.emplace_back(weight(e, f), f);
            }
        }
        std::sort(row.begin(), row.end());
        if (e == 0) {
            width_ = row.size();
            order_.reserve(width_ * static_cast<std::size_t>(count));
        }
        for (const auto& [w, f] : row) {
            order_.push_back(f);
        }
    }
}

double CandidateIndex::weight(int edge_i, int edge_j) const {
    double w = table_->score(edge_i, edge_j);
    if (table_->indexer().labels() == 8) {
        w += table_->score(edge_i ^ 4, edge_j ^ 4);
    }
    return w;
}

Kernel::Kernel(const PuzzleSpec& spec)
    : spec_(spec),
      short_(std::min(spec.rows, spec.cols)),
      long_(std::max(spec.rows, spec.cols)),
      radius_(long_),
      span_(2 * long_ - 1),
      board_(static_cast<std::size_t>(span_) * static_cast<std::size_t>(span_), -1),
      placed_(static_cast<std::size_t>(spec.piece_count()), 0) {
    reset();
}

void Kernel::reset() {
    std::fill(board_.begin(), board_.end(), -1);
    std::fill(placed_.begin(), placed_.end(), 0);
    placed_count_ = 0;
    min_row_ = max_row_ = min_col_ = max_col_ = 0;
    if (spec_.type == PuzzleType::Type1) {
        row_lock_ = spec_.rows == long_ && long_ != short_ ? FrameLock::LockedToLong : FrameLock::LockedToShort;
        col_lock_ = spec_.cols == long_ && long_ != short_ ? FrameLock::LockedToLong : FrameLock::LockedToShort;
    } else {
        row_lock_ = col_lock_ = FrameLock::Free;
    }
}

std::optional<Placement> Kernel::at(Cell c) const {
    if (!occupied(c)) {
        return std::nullopt;
    }
    return decode(board_[slot(c)]);
}

bool Kernel::frame_allows(Cell c) const {
    if (!inside(c)) {
        return false;
    }
    if (placed_count_ == 0) {
        return true;
    }
    const int rows = std::max(max_row_, c.row) - std::min(min_row_, c.row) + 1;
    const int cols = std::max(max_col_, c.col) - std::min(min_col_, c.col) + 1;
    if (spec_.type == PuzzleType::Type1) {
        return rows <= spec_.rows && cols <= spec_.cols;
    }
    if (row_lock_ != FrameLock::Free) {
        const int row_cap = row_lock_ == FrameLock::LockedToLong ? long_ : short_;
        const int col_cap = col_lock_ == FrameLock::LockedToLong ? long_ : short_;
        return rows <= row_cap && cols <= col_cap;
    }
    if (rows <= short_ && cols <= short_) {
        return true;
    }
    return (rows <= long_ && cols <= short_) || (cols <= long_ && rows <= short_);
}

void Kernel::place(Cell c, const Placement& p) {
    if (!inside(c) || board_[slot(c)] >= 0 || is_placed(p.piece)) {
        throw std::logic_error("kernel placement on an occupied cell or of a placed piece");
    }
    board_[slot(c)] = encode(p);
    placed_[static_cast<std::size_t>(p.piece)] = 1;
    if (placed_count_ == 0) {
        min_row_ = max_row_ = c.row;
        min_col_ = max_col_ = c.col;
    } else {
        min_row_ = std::min(min_row_, c.row);
        max_row_ = std::max(max_row_, c.row);
        min_col_ = std::min(min_col_, c.col);
        max_col_ = std::max(max_col_, c.col);
    }
    ++placed_count_;
    if (row_lock_ == FrameLock::Free && long_ != short_) {
        if (row_extent() > short_) {
            row_lock_ = FrameLock::LockedToLong;
            col_lock_ = FrameLock::LockedToShort;
        } else if (col_extent() > short_) {
            col_lock_ = FrameLock::LockedToLong;
            row_lock_ = FrameLock::LockedToShort;
        }
    }
}

Chromosome Kernel::to_chromosome() const {
    Chromosome out(row_extent(), col_extent());
    for (int r = min_row_; r <= max_row_; ++r) {
        for (int c = min_col_; c <= max_col_; ++c) {
            const std::int32_t code = board_[slot({r, c})];
            if (code < 0) {
                throw std::logic_error("kernel has holes");
            }
            out.at(r - min_row_, c - min_col_) = decode(code);
        }
    }
    return out;
}

bool feasible(const Kernel& kernel, const CandidateEdge& candidate, const PuzzleSpec& spec,
              const EdgeIndexer& indexer) {
    const Placement& p = candidate.placement;
    if (p.piece < 0 || p.piece >= indexer.piece_count() || kernel.is_placed(p.piece)) {
        return false;
    }
    if (kernel.occupied(candidate.target) || !kernel.frame_allows(candidate.target)) {
        return false;
    }
    if ((spec.type == PuzzleType::Type1 && p.rotation != 0) || (spec.type != PuzzleType::Type4 && p.face != Face::Front) ||
        p.rotation > 3) {
        return false;
    }
    const Relation& r = candidate.relation;
    const bool first_is_new = r.first.piece == p.piece;
    if (first_is_new == (r.second.piece == p.piece)) {
        return false;
    }
    const PieceEdge& fresh = first_is_new ? r.first : r.second;
    const PieceEdge& anchor = first_is_new ? r.second : r.first;
    // Every created seam joins an empty side of a placed neighbor with a side
    // of the fresh piece, so no edge can be used twice; what remains is that
    // the named edges really meet, which also pins the fresh piece's face.
    for (const Side s : kSides) {
        const auto q = kernel.at(neighbor(candidate.target, s));
        if (q && q->piece == anchor.piece) {
            return visible_edge(*q, opposite(s)) == anchor.edge && visible_edge(p, s) == fresh.edge;
        }
    }
    return false;
}

CrossoverWorkspace::CrossoverWorkspace(const PuzzleSpec& spec)
    : kernel_(spec),
      cursor_(static_cast<std::size_t>(spec.piece_count() * spec.edges_per_piece()), 0),
      unplaced_(static_cast<std::size_t>(spec.piece_count())),
      unplaced_pos_(static_cast<std::size_t>(spec.piece_count())) {}

KernelCrossover::KernelCrossover(const PuzzleSpec& spec, const CandidateIndex& candidates, double mutation_rate)
    : spec_(spec), candidates_(&candidates), table_(&candidates.table()), mutation_rate_(mutation_rate) {}

bool KernelCrossover::buddy_seam(int from, int to) const {
    if (table_->is_best_buddy(from, to)) {
        return true;
    }
    return spec_.type == PuzzleType::Type4 && table_->is_best_buddy(from ^ 4, to ^ 4);
}

Placement KernelCrossover::placement_for(int to, Side facing) const {
    const PieceEdge pe = table_->indexer().edge(to);
    const Orientation o = orientation_showing(pe.edge, facing);
    return {pe.piece, o.rotation, o.face};
}

void KernelCrossover::push_cursor(CrossoverWorkspace& ws, std::int32_t from, Cell target) const {
    const auto partners = candidates_->partners(from);
    auto& cur = ws.cursor_[static_cast<std::size_t>(from)];
    const int labels = table_->indexer().labels();
    while (static_cast<std::size_t>(cur) < partners.size() &&
           ws.kernel_.is_placed(partners[static_cast<std::size_t>(cur)] / labels)) {
        ++cur;
    }
    if (static_cast<std::size_t>(cur) == partners.size()) {
        return;
    }
    const std::int32_t to = partners[static_cast<std::size_t>(cur)];
    ws.heap_.push_back({candidates_->weight(from, to), to, from, target});
    std::push_heap(ws.heap_.begin(), ws.heap_.end(), [](const auto& a, const auto& b) { return heap_after(a, b); });
}

void KernelCrossover::open_sides(CrossoverWorkspace& ws, Cell cell, const Placement& p, const ParentRelations& first,
                                 const ParentRelations& second) const {
    const EdgeIndexer& ix = table_->indexer();
    for (const Side s : kSides) {
        const Cell target = neighbor(cell, s);
        if (ws.kernel_.occupied(target) || !ws.kernel_.frame_allows(target)) {
            continue;
        }
        const std::int32_t from = ix.index({p.piece, visible_edge(p, s)});
        const int a = first.partner(from);
        const int b = second.partner(from);
        const auto free_partner = [&](int f) { return f >= 0 && !ws.kernel_.is_placed(ix.edge(f).piece); };
        if (a == b && free_partner(a)) {
            ws.shared_.push_back({target, s, from, a});
        }
        if (free_partner(a) && buddy_seam(from, a)) {
            ws.buddies_.push_back({target, s, from, a});
        }
        if (b != a && free_partner(b) && buddy_seam(from, b)) {
            ws.buddies_.push_back({target, s, from, b});
        }
        ws.cursor_[static_cast<std::size_t>(from)] = 0;
        push_cursor(ws, from, target);
        ws.open_.push_back({target, s, from});
    }
}

void KernelCrossover::place(CrossoverWorkspace& ws, Cell cell, const Placement& p, const ParentRelations& first,
                            const ParentRelations& second) const {
    ws.kernel_.place(cell, p);
    const auto pos = static_cast<std::size_t>(ws.unplaced_pos_[static_cast<std::size_t>(p.piece)]);
    const PieceIndex last = ws.unplaced_.back();
    ws.unplaced_[pos] = last;
    ws.unplaced_pos_[static_cast<std::size_t>(last)] = static_cast<std::int32_t>(pos);
    ws.unplaced_.pop_back();
    open_sides(ws, cell, p, first, second);
}

bool KernelCrossover::pop_listed(std::vector<CrossoverWorkspace::Listed>& list, CrossoverWorkspace& ws, Rng& rng,
                                 CrossoverWorkspace::Listed& out) const {
    const int labels = table_->indexer().labels();
    while (!list.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
        const std::size_t i = pick(rng);
        const auto c = list[i];
        list[i] = list.back();
        list.pop_back();
        if (!ws.kernel_.occupied(c.target) && !ws.kernel_.is_placed(c.to / labels) &&
            ws.kernel_.frame_allows(c.target)) {
            out = c;
            return true;
        }
    }
    return false;
}

Chromosome KernelCrossover::operator()(const ParentRelations& first, const ParentRelations& second, Rng& rng,
                                       CrossoverWorkspace& ws, CrossoverTrace* trace) const {
    const EdgeIndexer& ix = table_->indexer();
    const int n = ix.piece_count();
    ws.kernel_.reset();
    ws.shared_.clear();
    ws.buddies_.clear();
    ws.heap_.clear();
    ws.open_.clear();
    ws.unplaced_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ws.unplaced_[static_cast<std::size_t>(i)] = i;
        ws.unplaced_pos_[static_cast<std::size_t>(i)] = i;
    }
    if (trace) {
        trace->steps.clear();
    }

    const PieceIndex seed = std::uniform_int_distribution<PieceIndex>(0, n - 1)(rng);
    if (trace) {
        trace->seed = seed;
    }
    place(ws, {0, 0}, Placement{seed, 0, Face::Front}, first, second);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto record = [&](Phase phase, int from, int to) {
        if (trace) {
            trace->steps.push_back({phase, Relation::make(ix.edge(from), ix.edge(to))});
        }
    };
    const auto heap_cmp = [](const auto& a, const auto& b) { return heap_after(a, b); };

    while (ws.kernel_.size() < n) {
        CrossoverWorkspace::Listed pick;
        if (pop_listed(ws.shared_, ws, rng, pick) || pop_listed(ws.buddies_, ws, rng, pick)) {
            const bool shared = first.partner(pick.from) == pick.to && second.partner(pick.from) == pick.to;
            place(ws, pick.target, placement_for(pick.to, opposite(pick.side)), first, second);
            record(shared ? Phase::Shared : Phase::BestBuddy, pick.from, pick.to);
            continue;
        }

        bool placed = false;
        if (mutation_rate_ > 0.0 && unit(rng) < mutation_rate_) {
            while (!ws.open_.empty() && !placed) {
                std::uniform_int_distribution<std::size_t> which(0, ws.open_.size() - 1);
                const std::size_t i = which(rng);
                const auto o = ws.open_[i];
                if (ws.kernel_.occupied(o.target) || !ws.kernel_.frame_allows(o.target)) {
                    ws.open_[i] = ws.open_.back();
                    ws.open_.pop_back();
                    continue;
                }
                std::uniform_int_distribution<std::size_t> any(0, ws.unplaced_.size() - 1);
                Placement p{ws.unplaced_[any(rng)], 0, Face::Front};
                if (spec_.type != PuzzleType::Type1) {
                    p.rotation = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 3)(rng));
                }
                if (spec_.type == PuzzleType::Type4 && unit(rng) < 0.5) {
                    p.face = Face::Back;
                }
                const int to = ix.index({p.piece, visible_edge(p, opposite(o.side))});
                place(ws, o.target, p, first, second);
                record(Phase::Mutation, o.from, to);
                placed = true;
            }
            if (placed) {
                continue;
            }
        }

        while (!ws.heap_.empty() && !placed) {
            std::pop_heap(ws.heap_.begin(), ws.heap_.end(), heap_cmp);
            const auto top = ws.heap_.back();
            ws.heap_.pop_back();
            if (ws.kernel_.occupied(top.target) || !ws.kernel_.frame_allows(top.target)) {
                continue;
            }
            if (ws.kernel_.is_placed(top.to / ix.labels())) {
                push_cursor(ws, top.from, top.target);
                continue;
            }
            const auto side = [&] {
                for (const Side s : kSides) {
                    const auto q = ws.kernel_.at(neighbor(top.target, s));
                    if (q && ix.index({q->piece, visible_edge(*q, opposite(s))}) == top.from) {
                        return s;
                    }
                }
                throw std::logic_error("greedy candidate lost its anchor");
            }();
            place(ws, top.target, placement_for(top.to, side), first, second);
            record(Phase::Greedy, top.from, top.to);
            placed = true;
        }
        if (!placed) {
            throw std::logic_error("crossover ran out of candidates with pieces left");
        }
    }
    return ws.kernel_.to_chromosome();
}

Chromosome KernelCrossover::operator()(const Chromosome& first, const Chromosome& second, Rng& rng,
                                       CrossoverTrace* trace) const {
    const EdgeIndexer& ix = table_->indexer();
    CrossoverWorkspace ws(spec_);
    return (*this)(ParentRelations(first, ix), ParentRelations(second, ix), rng, ws, trace);
}

}  // namespace jigsaw
