#include "floyd/op_parser.hpp"

#include <algorithm>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

Word ParseNode::frontier() const {
    if (is_leaf) return {terminal};
    Word out;
    for (const auto& c : children) {
        Word sub = c.frontier();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

namespace {

// Unit-rule ancestors: close(L) = {A : A =>renaming* X, X in L}.
std::map<std::string, std::set<std::string>> unit_ancestor_map(const Grammar& g) {
    std::map<std::string, std::set<std::string>> anc;
    for (const auto& nt : g.nonterminals) anc[nt].insert(nt);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (r.rhs.size() != 1 || !r.rhs[0].is_nonterminal()) continue;
            auto& target = anc[r.rhs[0].name];
            for (const auto& a : anc[r.lhs])
                if (target.insert(a).second) grew = true;
        }
    }
    return anc;
}

struct StackEntry {
    bool is_node = false;
    std::string terminal;
    std::size_t position = 0;       // input index of a shifted terminal
    PrecRel rel = PrecRel::Yields;  // relation recorded when the terminal was shifted
    ParseNode node;
};

}  // namespace

OpParser::OpParser(const Grammar& g) : g_(g) {
    auto opm = build_opm(g);
    if (!opm.floyd()) throw NotFloyd("parse: grammar has precedence conflicts");
    matrix_ = opm.matrix;
    ancestors_ = unit_ancestor_map(g);
    for (const auto& r : g.rules)
        if (r.lhs == g.axiom && r.rhs.empty()) axiom_epsilon_ = true;
}

ParseResult OpParser::parse(const Word& w) const {
    for (const auto& t : w)
        if (!g_.terminals.count(t)) throw Error("parse: unknown terminal '" + t + "'");

    ParseResult res;
    if (w.empty()) {
        res.accept = axiom_epsilon_;
        if (!res.accept) { res.reason = RejectReason::BadResidue; res.detail = "empty input"; }
        return res;
    }

    auto closed_contains = [&](const std::set<std::string>& labels, const std::string& nt) {
        for (const auto& l : labels) {
            auto it = ancestors_.find(l);
            if (it != ancestors_.end() && it->second.count(nt)) return true;
        }
        return false;
    };

    std::vector<StackEntry> stack;
    size_t pos = 0;

    auto top_terminal = [&]() -> StackEntry* {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if (!it->is_node) return &*it;
        return nullptr;
    };

    while (true) {
        StackEntry* t = top_terminal();
        std::string left = t ? t->terminal : kLeftDelim;
        std::string right = pos < w.size() ? w[pos] : kRightDelim;
        bool at_end = pos >= w.size();

        if (!t && at_end) break;  // residue check below

        std::optional<PrecRel> rel;
        if (!t)
            rel = PrecRel::Yields;  // |- yields to every letter
        else if (at_end)
            rel = PrecRel::Takes;  // every letter takes over -|
        else {
            RelSet cell = matrix_.at(left, right);
            if (!cell.empty()) rel = cell.values()[0];
        }
        res.trace.push_back({TraceEvent::Kind::Compare, left, right, rel, "", 0, {}});

        if (!rel) {
            res.reason = RejectReason::PrecedenceGap;
            res.detail = "no relation between '" + left + "' and '" + right + "'";
            return res;
        }

        if (*rel == PrecRel::Yields || *rel == PrecRel::Equal) {
            StackEntry e;
            e.is_node = false;
            e.terminal = right;
            e.position = pos;
            e.rel = *rel;
            stack.push_back(std::move(e));
            res.trace.push_back({TraceEvent::Kind::Shift, "", "", {}, right, 0, {}});
            ++pos;
            continue;
        }

        // Reduce: pop back to (and including) the last <-shifted terminal,
        // then take the node directly below it, if any.
        std::vector<StackEntry> handle;
        bool found_fence = false;
        while (!stack.empty()) {
            StackEntry e = std::move(stack.back());
            stack.pop_back();
            bool fence = !e.is_node && e.rel == PrecRel::Yields;
            handle.push_back(std::move(e));
            if (fence) { found_fence = true; break; }
        }
        if (!found_fence) {
            res.reason = RejectReason::BadResidue;
            res.detail = "reduce with no handle fence";
            return res;
        }
        if (!stack.empty() && stack.back().is_node) {
            handle.push_back(std::move(stack.back()));
            stack.pop_back();
        }
        std::reverse(handle.begin(), handle.end());

        // Match the handle against every rule rhs; nonterminal positions are
        // satisfied through renaming-closed child labels.
        std::set<std::string> labels;
        for (const auto& r : g_.rules) {
            if (r.rhs.size() != handle.size()) continue;
            bool ok = true;
            for (size_t i = 0; i < handle.size() && ok; ++i) {
                const Symbol& s = r.rhs[i];
                const StackEntry& h = handle[i];
                if (s.is_terminal())
                    ok = !h.is_node && h.terminal == s.name;
                else
                    ok = h.is_node && closed_contains(h.node.labels, s.name);
            }
            if (ok) labels.insert(r.lhs);
        }
        if (labels.empty()) {
            res.reason = RejectReason::NoMatchingRule;
            std::string shape;
            for (const auto& h : handle)
                shape += (shape.empty() ? "" : " ") + (h.is_node ? "N" : h.terminal);
            res.detail = "no rule matches handle [" + shape + "]";
            return res;
        }

        ParseNode node;
        node.labels = labels;
        node.begin = handle.front().is_node ? handle.front().node.begin : handle.front().position;
        node.end = handle.back().is_node ? handle.back().node.end : handle.back().position + 1;
        for (auto& h : handle) {
            if (h.is_node) {
                node.children.push_back(std::move(h.node));
            } else {
                ParseNode leaf;
                leaf.is_leaf = true;
                leaf.terminal = h.terminal;
                leaf.begin = h.position;
                leaf.end = h.position + 1;
                node.children.push_back(std::move(leaf));
            }
        }
        res.trace.push_back({TraceEvent::Kind::Reduce, "", "", {}, "", handle.size(), labels});

        StackEntry e;
        e.is_node = true;
        e.node = std::move(node);
        stack.push_back(std::move(e));
    }

    if (stack.size() == 1 && stack[0].is_node) {
        if (closed_contains(stack[0].node.labels, g_.axiom)) {
            res.accept = true;
            res.root = std::move(stack[0].node);
            return res;
        }
    }
    res.reason = RejectReason::BadResidue;
    res.detail = "residue does not reduce to the axiom";
    return res;
}

ParseResult parse(const Grammar& g, const Word& w) { return OpParser(g).parse(w); }

std::vector<TraceLink> precedence_trace(const PrecedenceMatrix& m, const Word& w) {
    for (const auto& t : w)
        if (m.index(t) < 0) throw Error("precedence_trace: letter '" + t + "' outside alphabet");
    std::vector<TraceLink> out;
    if (w.empty()) {
        out.push_back({kLeftDelim, kRightDelim, std::nullopt});
        return out;
    }
    out.push_back({kLeftDelim, w[0], PrecRel::Yields});
    for (size_t i = 0; i + 1 < w.size(); ++i) {
        RelSet cell = m.at(w[i], w[i + 1]);
        std::optional<PrecRel> rel;
        if (!cell.empty()) rel = cell.values()[0];
        out.push_back({w[i], w[i + 1], rel});
    }
    out.push_back({w.back(), kRightDelim, PrecRel::Takes});
    return out;
}

std::string render_trace(const std::vector<TraceLink>& links) {
    std::ostringstream out;
    for (size_t i = 0; i < links.size(); ++i) {
        if (i == 0) out << links[i].left;
        out << (links[i].rel ? std::string(1, rel_glyph(*links[i].rel)) : std::string("?"));
        out << links[i].right;
    }
    return out.str();
}

namespace {

void render_tree_rec(const ParseNode& n, int depth, std::ostringstream& out) {
    for (int i = 0; i < depth; ++i) out << "  ";
    if (n.is_leaf) {
        out << n.terminal << "\n";
        return;
    }
    out << "{";
    bool first = true;
    for (const auto& l : n.labels) { out << (first ? "" : ",") << l; first = false; }
    out << "}  [" << n.begin << "," << n.end << ")\n";
    for (const auto& c : n.children) render_tree_rec(c, depth + 1, out);
}

}  // namespace

std::string render_tree(const ParseNode& n) {
    std::ostringstream out;
    render_tree_rec(n, 0, out);
    return out.str();
}

}  // namespace floyd
