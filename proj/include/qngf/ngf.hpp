#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace qngf {

/// Sorted node labels of a d-simplex (d+1 nodes) or of a (d-1)-face (d nodes).
using NodeSet = std::vector<int>;

struct GrowthConfig {
  int dimension = 2;
  int flavor = -1;
  int nodes = 50;
  std::uint64_t seed = 1;

  /// Throws invalid_parameter unless dimension >= 1, flavor in {-1,0,1}
  /// and nodes >= dimension + 1.
  void validate() const;
};

/// Pure d-dimensional simplicial complex grown by face attachment.
///
/// Faces are kept in insertion order; that order is the sampling order used
/// during growth. The incidence counter of a face is the number of incident
/// d-simplices minus one.
class SimplicialComplex {
 public:
  /// A single d-simplex on nodes 0..d.
  SimplicialComplex(int dimension, int flavor);

  int dimension() const { return dimension_; }
  int flavor() const { return flavor_; }
  int node_count() const { return node_count_; }

  const std::vector<NodeSet>& simplices() const { return simplices_; }
  const std::vector<NodeSet>& faces() const { return faces_; }
  const std::vector<int>& incidence() const { return incidence_; }

  /// Incidence counter of a face, or -1 if the node set is not a face.
  int incidence_of(const NodeSet& face) const;

  /// Glues a new simplex onto faces()[face], introducing one new node.
  void attach(std::size_t face);

 private:
  void add_face(NodeSet face);

  int dimension_;
  int flavor_;
  int node_count_;
  std::vector<NodeSet> simplices_;
  std::vector<NodeSet> faces_;
  std::vector<int> incidence_;
  std::map<NodeSet, std::size_t> face_lookup_;
};

/// Per-face attachment weights 1 + s*n (same order as faces()) and their sum.
struct AttachmentWeights {
  std::vector<std::int64_t> weights;
  std::int64_t total = 0;
};

AttachmentWeights attachment_weights(const SimplicialComplex& complex);

/// Grows a complex to config.nodes nodes. `on_step` (if set) sees the complex
/// after every attachment.
SimplicialComplex grow(const GrowthConfig& config,
                       const std::function<void(const SimplicialComplex&)>& on_step = {});

/// Sorted, de-duplicated (i, j) pairs with i < j over all simplex edges.
std::vector<std::pair<int, int>> edges(const SimplicialComplex& complex);

/// Symmetric 0/1 adjacency with zero diagonal.
Eigen::MatrixXi to_adjacency(const SimplicialComplex& complex);

Eigen::MatrixXi adjacency_from_edges(int nodes, const std::vector<std::pair<int, int>>& edge_list);

/// Edge-list file: one header line `# {"d":..,"s":..,"N":..,"seed":..}`
/// followed by one "i j" line per edge.
void write_edge_list(std::ostream& out, const SimplicialComplex& complex, std::uint64_t seed);

struct EdgeListFile {
  int nodes = 0;
  int dimension = 0;
  int flavor = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> edges;
};

EdgeListFile read_edge_list(std::istream& in);

}  // namespace qngf
