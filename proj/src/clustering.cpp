#include "anthro/clustering.hpp"

#include "anthro/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

namespace anthro {

std::string_view linkage_name(Linkage l)
{
    switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    }
    return "?";
}

Linkage parse_linkage(std::string_view s)
{
    if (s == "single") return Linkage::Single;
    if (s == "average") return Linkage::Average;
    if (s == "complete") return Linkage::Complete;
    throw InvalidArgument("unknown linkage '" + std::string(s) + "' (expected single|average|complete)");
}

namespace {

using Key = std::tuple<double, int, int>;

Key make_key(double d, int node_x, int node_y)
{
    return {d, std::min(node_x, node_y), std::max(node_x, node_y)};
}

} // namespace

Dendrogram agglomerate(const Eigen::MatrixXd& D0, std::vector<std::string> labels, Linkage linkage)
{
    const int n = static_cast<int>(D0.rows());
    if (D0.cols() != n) throw InvalidArgument("distance matrix must be square");
    if (n < 2) throw TooFewSubjectsError("clustering needs at least 2 subjects");
    if (static_cast<int>(labels.size()) != n) throw InvalidArgument("label count differs from matrix size");
    for (int i = 0; i < n; ++i) {
        if (D0(i, i) != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j)
            if (std::abs(D0(i, j) - D0(j, i)) > 1e-12 * std::max(1.0, std::abs(D0(i, j))))
                throw InvalidArgument("distance matrix must be symmetric");
    }

    Eigen::MatrixXd D = D0;
    std::vector<int> node(n), size(n, 1), nn(n, -1);
    std::vector<char> active(n, 1);
    std::vector<Key> best(n);
    std::iota(node.begin(), node.end(), 0);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Each active slot caches its best partner over all other active slots.
    auto refresh = [&](int s) {
        nn[s] = -1;
        best[s] = {inf, std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
        for (int t = 0; t < n; ++t) {
            if (t == s || !active[t]) continue;
            const Key key = make_key(D(s, t), node[s], node[t]);
            if (key < best[s]) {
                best[s] = key;
                nn[s] = t;
            }
        }
    };
    for (int s = 0; s < n; ++s) refresh(s);

    Dendrogram tree;
    tree.leaves = std::move(labels);
    tree.linkage = linkage;
    for (int step = 0; step < n - 1; ++step) {
        int a = -1;
        for (int s = 0; s < n; ++s)
            if (active[s] && nn[s] >= 0 && (a < 0 || best[s] < best[a])) a = s;
        const int b = nn[a];
        const double h = D(a, b);
        const int new_id = n + step;
        tree.merges.push_back({std::min(node[a], node[b]), std::max(node[a], node[b]), h, new_id});

        for (int k = 0; k < n; ++k) {
            if (!active[k] || k == a || k == b) continue;
            double d = 0.0;
            switch (linkage) {
            case Linkage::Single: d = std::min(D(a, k), D(b, k)); break;
            case Linkage::Complete: d = std::max(D(a, k), D(b, k)); break;
            case Linkage::Average: d = (size[a] * D(a, k) + size[b] * D(b, k)) / (size[a] + size[b]); break;
            }
            D(a, k) = D(k, a) = d;
        }
        active[b] = 0;
        size[a] += size[b];
        node[a] = new_id;

        refresh(a);
        for (int k = 0; k < n; ++k) {
            if (!active[k] || k == a) continue;
            if (nn[k] == a || nn[k] == b) {
                refresh(k);
            } else {
                const Key key = make_key(D(k, a), node[k], node[a]);
                if (key < best[k]) {
                    best[k] = key;
                    nn[k] = a;
                }
            }
        }
    }
    return tree;
}

Dendrogram agglomerate(const SimilarityMatrix& S, Linkage linkage)
{
    return agglomerate(S.D, S.ids, linkage);
}

ClusterAssignment cut(const Dendrogram& tree, int k)
{
    const int n = tree.leaf_count();
    if (k < 1 || k > n) throw InvalidKError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int i = 0; i < n - k; ++i) {
        const auto& m = tree.merges[i];
        parent[find(m.node_a)] = m.new_node;
        parent[find(m.node_b)] = m.new_node;
    }
    ClusterAssignment out;
    out.k = k;
    out.subjects = tree.leaves;
    out.labels.assign(n, -1);
    std::map<int, int> label_of_root;
    for (int leaf = 0; leaf < n; ++leaf) {
        const int root = find(leaf);
        auto [it, inserted] = label_of_root.try_emplace(root, static_cast<int>(label_of_root.size()));
        out.labels[leaf] = it->second;
    }
    return out;
}

void write_cluster_csv(std::ostream& out, const ClusterAssignment& a)
{
    out << "subject_id,cluster\n";
    for (std::size_t i = 0; i < a.subjects.size(); ++i) out << a.subjects[i] << ',' << a.labels[i] << '\n';
}

namespace {

struct NodeView {
    const Dendrogram& tree;
    int n;

    double height(int id) const { return id < n ? 0.0 : tree.merges[id - n].height; }
    const Merge& merge(int id) const { return tree.merges[id - n]; }
};

std::string newick_name(const std::string& s)
{
    if (s.find_first_of(" ():;,[]'\t") == std::string::npos && !s.empty()) return s;
    std::string q = "'";
    for (char c : s) {
        if (c == '\'') q += '\'';
        q += c;
    }
    return q + "'";
}

void newick_rec(const NodeView& v, int id, std::string& out)
{
    if (id < v.n) {
        out += newick_name(v.tree.leaves[id]);
        return;
    }
    const auto& m = v.merge(id);
    out += '(';
    newick_rec(v, m.node_a, out);
    out += ':' + format_double(m.height - v.height(m.node_a)) + ',';
    newick_rec(v, m.node_b, out);
    out += ':' + format_double(m.height - v.height(m.node_b)) + ')';
}

nlohmann::ordered_json json_rec(const NodeView& v, int id)
{
    nlohmann::ordered_json j;
    j["id"] = id;
    j["height"] = v.height(id);
    if (id < v.n) {
        j["name"] = v.tree.leaves[id];
    } else {
        const auto& m = v.merge(id);
        j["children"] = nlohmann::ordered_json::array({json_rec(v, m.node_a), json_rec(v, m.node_b)});
    }
    return j;
}

} // namespace

std::string to_newick(const Dendrogram& tree)
{
    const NodeView v{tree, tree.leaf_count()};
    std::string out;
    if (tree.merges.empty()) {
        if (!tree.leaves.empty()) out = newick_name(tree.leaves[0]);
    } else {
        newick_rec(v, tree.merges.back().new_node, out);
    }
    return out + ';';
}

std::string to_json(const Dendrogram& tree)
{
    const NodeView v{tree, tree.leaf_count()};
    if (tree.merges.empty()) throw InvalidArgument("dendrogram has no merges");
    auto j = json_rec(v, tree.merges.back().new_node);
    j["linkage"] = linkage_name(tree.linkage);
    return j.dump();
}

Dendrogram dendrogram_from_json(std::string_view text)
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("dendrogram JSON: ") + e.what());
    }
    std::map<int, std::string> leaves;
    std::map<int, Merge> internal;
    std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& j) {
        const int id = j.at("id").get<int>();
        if (j.contains("children")) {
            const auto& ch = j.at("children");
            if (!ch.is_array() || ch.size() != 2) throw ParseError("internal node must have two children");
            const int a = ch[0].at("id").get<int>(), b = ch[1].at("id").get<int>();
            internal[id] = {std::min(a, b), std::max(a, b), j.at("height").get<double>(), id};
            walk(ch[0]);
            walk(ch[1]);
        } else {
            leaves[id] = j.at("name").get<std::string>();
        }
    };
    Dendrogram tree;
    try {
        walk(root);
        tree.linkage = parse_linkage(root.value("linkage", std::string("average")));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("dendrogram JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    const int n = static_cast<int>(leaves.size());
    for (int i = 0; i < n; ++i) {
        auto it = leaves.find(i);
        if (it == leaves.end()) throw ParseError("leaf ids must be 0..n-1");
        tree.leaves.push_back(it->second);
    }
    for (int i = 0; i < n - 1; ++i) {
        auto it = internal.find(n + i);
        if (it == internal.end()) throw ParseError("internal node ids must be n..2n-2");
        tree.merges.push_back(it->second);
    }
    if (static_cast<int>(internal.size()) != n - 1) throw ParseError("node count mismatch");
    return tree;
}

} // namespace anthro
