#pragma once

#include "anthro/simspace.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace anthro {

enum class Linkage { Single, Average, Complete };

std::string_view linkage_name(Linkage l);
Linkage parse_linkage(std::string_view s); // throws InvalidArgument

struct Merge {
    int node_a = 0; // node_a < node_b
    int node_b = 0;
    double height = 0.0;
    int new_node = 0;
};

/// Leaves are nodes 0..n-1; merge i creates node n+i.
struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
    Linkage linkage = Linkage::Average;

    int leaf_count() const { return static_cast<int>(leaves.size()); }
};

/// Agglomerative clustering with Lance-Williams updates. Each step merges the
/// pair with the smallest linkage distance; ties go to the lexicographically
/// smallest (node_a, node_b). Throws TooFewSubjectsError (n < 2),
/// InvalidArgument (D not square, not symmetric, or non-zero diagonal).
Dendrogram agglomerate(const Eigen::MatrixXd& D, std::vector<std::string> labels, Linkage linkage = Linkage::Average);
Dendrogram agglomerate(const SimilarityMatrix& S, Linkage linkage = Linkage::Average);

struct ClusterAssignment {
    int k = 0;
    std::vector<std::string> subjects; // leaf order
    std::vector<int> labels;           // cluster per leaf, in [0, k)
};

/// Undoes the last k-1 merges; clusters are numbered by their smallest leaf
/// index. Throws InvalidKError.
ClusterAssignment cut(const Dendrogram& tree, int k);

void write_cluster_csv(std::ostream& out, const ClusterAssignment& a);

/// Newick with branch length = parent height - child height.
std::string to_newick(const Dendrogram& tree);
/// Nested {"id","height","children":[...]} rooted at the final merge; leaves
/// carry "name". The root also records "linkage".
std::string to_json(const Dendrogram& tree);
/// Inverse of to_json. Throws ParseError.
Dendrogram dendrogram_from_json(std::string_view text);

} // namespace anthro
