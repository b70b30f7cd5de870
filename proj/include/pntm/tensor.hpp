#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pntm/common.hpp"

namespace pntm {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

// Flat value buffer shared between tensors (reshapes alias it).
struct Storage {
  DType dtype = DType::f64;
  std::vector<double> d;  // used when dtype == f64
  std::vector<float> f;   // used when dtype == f32
};

class GradTape;
class Gradients;

// Dense row-major tensor. Values are immutable once the tensor is visible to
// other code; the optimizer and checkpoint loader update leaf parameters in
// place between tape lifetimes via mutable_values().
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape s, DType dt = DType::f64);
  static Tensor full(Shape s, double v, DType dt = DType::f64);
  static Tensor from(Shape s, const std::vector<double>& vals, DType dt = DType::f64);
  static Tensor scalar(double v, DType dt = DType::f64);
  static Tensor uninit(Shape s, DType dt = DType::f64);

  bool defined() const { return static_cast<bool>(st_); }
  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t numel() const { return numel_; }
  int64_t dim(int i) const;  // negative indices count from the back
  DType dtype() const { return st_->dtype; }

  double item() const;
  double at(int64_t flat_index) const;
  std::vector<double> to_vector() const;

  bool requires_grad() const { return requires_grad_; }
  Tensor& set_requires_grad(bool b) {
    requires_grad_ = b;
    return *this;
  }

  // True when an op involving this tensor must be recorded on the active tape.
  bool tracked() const;

  const double* f64() const { return st_->d.data(); }
  const float* f32() const { return st_->f.data(); }
  double* f64_raw() { return st_->d.data(); }
  float* f32_raw() { return st_->f.data(); }

  // In-place value update for leaves (optimizer steps, checkpoint load).
  void mutable_values(const std::vector<double>& vals);

  // Identity key for leaf parameters (shared by reshaped views).
  const Storage* storage_key() const { return st_.get(); }

 private:
  std::shared_ptr<Storage> st_;
  Shape shape_;
  int64_t numel_ = 0;
  bool requires_grad_ = false;
  int node_ = -1;
  uint64_t epoch_ = 0;

  friend class GradTape;
  friend Tensor finish_op(Tensor, std::initializer_list<const Tensor*>,
                          std::function<std::vector<Tensor>(const Tensor&)>);
  friend Tensor alias_with_shape(const Tensor&, Shape);
};

// Same storage, different shape; not tape-tracked (ops::reshape wraps this).
Tensor alias_with_shape(const Tensor& t, Shape s);

// Backward closure: receives d(root)/d(output), returns one gradient per
// parent (same order as recorded; an undefined Tensor means "no gradient").
using BackwardFn = std::function<std::vector<Tensor>(const Tensor&)>;

class Gradients {
 public:
  // Gradient for a leaf parameter; undefined Tensor if it never influenced
  // the root.
  Tensor grad(const Tensor& param) const;

 private:
  friend class GradTape;
  std::vector<Tensor> by_node_;
  std::unordered_map<const Storage*, int> leaves_;
};

// Eager reverse-mode tape. Constructing one makes it the active tape for the
// current thread; ops involving tracked tensors append nodes while it lives.
class GradTape {
 public:
  GradTape();
  ~GradTape();
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;

  static GradTape* active();

  int record(std::vector<int> parents, BackwardFn fn);
  // Get-or-create the leaf node for a requires_grad tensor.
  int leaf_node(const Tensor& t);
  // Node id of `t` in this tape, creating a leaf node when needed; -1 when
  // the tensor is a constant for this tape.
  int node_of(const Tensor& t);

  // Reverse accumulation from a scalar root. Every node is visited at most
  // once, in reverse insertion order (a valid reverse topological order).
  Gradients backward(const Tensor& root);

  size_t size() const { return nodes_.size(); }
  uint64_t epoch() const { return epoch_; }

 private:
  struct Node {
    std::vector<int> parents;
    BackwardFn fn;  // empty for leaves
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Storage*, int> leaves_;
  uint64_t epoch_;
};

// Suspends recording for the current thread while alive (used by the reverse
// pass itself and by inference-only transforms).
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
};

// Records `out` on the active tape when any input is tracked. `fn` must
// return parent gradients in the order of `ins`.
Tensor finish_op(Tensor out, std::initializer_list<const Tensor*> ins, BackwardFn fn);
Tensor finish_op_n(Tensor out, const std::vector<const Tensor*>& ins, BackwardFn fn);

void check_same_dtype(const Tensor& a, const Tensor& b, const char* what);

}  // namespace pntm
