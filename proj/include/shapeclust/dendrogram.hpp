#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shapeclust/cluster.hpp"
#include "shapeclust/common.hpp"
#include "shapeclust/linkage.hpp"

namespace shapeclust {

// Two dendrogram serializations: the merge list is the exact round-trip form
// (node ids and full-precision heights); the Newick string is for
// interoperability and carries heights as branch lengths.

inline void write_tree_csv(const std::filesystem::path& path, const LinkageTree& tree) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "node_id,left,right,height,size\n";
    for (std::size_t k = 0; k < tree.merges.size(); ++k) {
        const auto& m = tree.merges[k];
        os << (tree.n_leaves + k) << ',' << m.left << ',' << m.right << ','
           << format_double("%.17g", m.height) << ',' << m.size << '\n';
    }
}

inline LinkageTree read_tree_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.rfind("node_id,", 0) != 0)
        throw DecodeError("bad tree header in " + path.string());
    std::vector<Merge> merges;
    std::size_t first_node = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 5) throw DecodeError("bad tree row: " + line);
        Merge m;
        const std::size_t node_id = std::stoull(f[0]);
        m.left = std::stoull(f[1]);
        m.right = std::stoull(f[2]);
        m.height = std::strtod(f[3].c_str(), nullptr);
        m.size = std::stoull(f[4]);
        if (merges.empty()) first_node = node_id;
        merges.push_back(m);
    }
    if (merges.empty()) throw DecodeError("tree file has no merges: " + path.string());
    LinkageTree tree;
    tree.n_leaves = first_node;
    tree.merges = std::move(merges);
    return tree;
}

namespace detail {

inline bool newick_needs_quotes(std::string_view label) {
    return label.find_first_of(" ():,;'\t") != std::string_view::npos || label.empty();
}

inline void newick_append_label(std::string& out, const std::string& label) {
    if (!newick_needs_quotes(label)) {
        out += label;
        return;
    }
    out += '\'';
    for (char c : label) {
        out += c;
        if (c == '\'') out += '\'';
    }
    out += '\'';
}

} // namespace detail

/// Nested-parenthesis string with branch lengths = height differences and the
/// same left-to-right child order as leaf_order.
inline std::string to_newick(const LinkageTree& tree, std::span<const std::string> labels) {
    if (labels.size() != tree.n_leaves)
        throw LabelMismatch("to_newick: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(tree.n_leaves) + " leaves");
    const std::size_t n = tree.n_leaves;
    std::vector<std::size_t> min_desc(tree.node_count());
    for (std::size_t i = 0; i < n; ++i) min_desc[i] = i;
    for (std::size_t k = 0; k < tree.merges.size(); ++k)
        min_desc[n + k] = std::min(min_desc[tree.merges[k].left], min_desc[tree.merges[k].right]);

    std::string out;
    auto height_of = [&](std::size_t id) { return id < n ? 0.0 : tree.merges[id - n].height; };
    auto emit = [&](auto&& self, std::size_t id, double parent_height) -> void {
        if (id < n) {
            detail::newick_append_label(out, labels[id]);
        } else {
            const auto& m = tree.merges[id - n];
            std::size_t first = m.left, second = m.right;
            if (min_desc[second] < min_desc[first]) std::swap(first, second);
            out += '(';
            self(self, first, m.height);
            out += ',';
            self(self, second, m.height);
            out += ')';
        }
        out += ':';
        out += format_double("%.17g", parent_height - height_of(id));
    };
    if (tree.merges.empty()) {
        if (n != 1) throw DecodeError("to_newick: tree without merges");
        detail::newick_append_label(out, labels[0]);
        out += ';';
        return out;
    }
    const auto& root = tree.merges.back();
    std::size_t first = root.left, second = root.right;
    if (min_desc[second] < min_desc[first]) std::swap(first, second);
    out += '(';
    emit(emit, first, root.height);
    out += ',';
    emit(emit, second, root.height);
    out += ");";
    return out;
}

struct ParsedNewick {
    LinkageTree tree;
    std::vector<std::string> labels; // by leaf id, i.e. order of appearance
};

/// Parse a binary Newick string back into a tree. Heights are reconstructed
/// from branch lengths (leaves at height 0); internal nodes are re-indexed by
/// ascending height, ties by smallest descendant leaf.
inline ParsedNewick parse_newick(std::string_view text) {
    struct Node {
        int left = -1, right = -1;
        double branch = 0.0;
        double height = 0.0;
        std::size_t min_desc = 0;
        std::string label;
        bool leaf = false;
    };
    std::vector<Node> nodes;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\r' ||
                                     text[pos] == '\t'))
            ++pos;
    };
    auto fail = [&](const std::string& why) -> void {
        throw DecodeError("newick: " + why + " at offset " + std::to_string(pos));
    };

    auto parse_label = [&]() -> std::string {
        std::string label;
        if (pos < text.size() && text[pos] == '\'') {
            ++pos;
            while (pos < text.size()) {
                if (text[pos] == '\'') {
                    if (pos + 1 < text.size() && text[pos + 1] == '\'') {
                        label += '\'';
                        pos += 2;
                    } else {
                        ++pos;
                        return label;
                    }
                } else {
                    label += text[pos++];
                }
            }
            fail("unterminated quoted label");
        }
        while (pos < text.size() && text.find_first_of("():,;'", pos) != pos) label += text[pos++];
        return label;
    };
    auto parse_branch = [&]() -> double {
        skip_ws();
        if (pos >= text.size() || text[pos] != ':') return 0.0;
        ++pos;
        const char* begin = text.data() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected branch length");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    };

    auto parse_node = [&](auto&& self) -> int {
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            const int left = self(self);
            skip_ws();
            if (pos >= text.size() || text[pos] != ',') fail("expected ','");
            ++pos;
            const int right = self(self);
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            parse_label(); // optional internal label, ignored
            Node node;
            node.left = left;
            node.right = right;
            node.branch = parse_branch();
            nodes.push_back(node);
            return static_cast<int>(nodes.size() - 1);
        }
        Node node;
        node.leaf = true;
        node.label = parse_label();
        node.branch = parse_branch();
        nodes.push_back(node);
        return static_cast<int>(nodes.size() - 1);
    };

    const int root = parse_node(parse_node);
    skip_ws();
    if (pos >= text.size() || text[pos] != ';') fail("expected ';'");

    // heights: root height = longest leaf-to-root branch sum, then descend
    auto assign_heights = [&](auto&& self, int id, double h) -> void {
        nodes[id].height = nodes[id].leaf ? 0.0 : h;
        if (!nodes[id].leaf) {
            self(self, nodes[id].left, h - nodes[nodes[id].left].branch);
            self(self, nodes[id].right, h - nodes[nodes[id].right].branch);
        }
    };
    auto depth_of = [&](auto&& self, int id) -> double {
        if (nodes[id].leaf) return 0.0;
        return std::max(self(self, nodes[id].left) + nodes[nodes[id].left].branch,
                        self(self, nodes[id].right) + nodes[nodes[id].right].branch);
    };
    assign_heights(assign_heights, root, depth_of(depth_of, root));

    ParsedNewick result;
    std::vector<int> internal;
    auto index_leaves = [&](auto&& self, int id) -> void {
        if (nodes[id].leaf) {
            nodes[id].min_desc = result.labels.size();
            result.labels.push_back(nodes[id].label);
            return;
        }
        internal.push_back(id);
        self(self, nodes[id].left);
        self(self, nodes[id].right);
        nodes[id].min_desc = std::min(nodes[nodes[id].left].min_desc,
                                      nodes[nodes[id].right].min_desc);
    };
    index_leaves(index_leaves, root);
    const std::size_t n = result.labels.size();
    if (n < 2) throw DecodeError("newick: fewer than 2 leaves");

    std::sort(internal.begin(), internal.end(), [&](int a, int b) {
        if (nodes[a].height != nodes[b].height) return nodes[a].height < nodes[b].height;
        return nodes[a].min_desc < nodes[b].min_desc;
    });
    std::vector<std::size_t> new_id(nodes.size());
    auto leaf_counter = [&](auto&& self, int id) -> std::size_t {
        if (nodes[id].leaf) return 1;
        return self(self, nodes[id].left) + self(self, nodes[id].right);
    };
    auto leaf_id = [&](auto&& self, int id) -> void {
        if (nodes[id].leaf) new_id[id] = nodes[id].min_desc;
        if (!nodes[id].leaf) {
            self(self, nodes[id].left);
            self(self, nodes[id].right);
        }
    };
    leaf_id(leaf_id, root);
    result.tree.n_leaves = n;
    for (std::size_t k = 0; k < internal.size(); ++k) new_id[internal[k]] = n + k;
    for (std::size_t k = 0; k < internal.size(); ++k) {
        const Node& node = nodes[internal[k]];
        Merge m;
        m.left = new_id[node.left];
        m.right = new_id[node.right];
        if (m.left > m.right) std::swap(m.left, m.right);
        m.height = node.height;
        m.size = leaf_counter(leaf_counter, internal[k]);
        result.tree.merges.push_back(m);
    }
    return result;
}

/// Write both serializations; each re-parses to the same tree.
inline void export_dendrogram(const LinkageTree& tree, std::span<const std::string> labels,
                              const std::filesystem::path& csv_path,
                              const std::filesystem::path& newick_path) {
    if (labels.size() != tree.n_leaves)
        throw LabelMismatch("export_dendrogram: label count != leaf count");
    write_tree_csv(csv_path, tree);
    std::ofstream os(newick_path, std::ios::binary);
    if (!os) throw IoError("cannot open " + newick_path.string() + " for writing");
    os << to_newick(tree, labels) << '\n';
}

} // namespace shapeclust
