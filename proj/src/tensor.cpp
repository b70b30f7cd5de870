#include "pntm/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace pntm {

namespace {
std::atomic<uint64_t> g_epoch_counter{1};
thread_local std::vector<GradTape*> g_tape_stack;
}  // namespace

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

Tensor Tensor::uninit(Shape s, DType dt) {
  if (s.empty()) fail(errc::shape_mismatch, "rank-0 tensors are not supported");
  for (int64_t d : s)
    if (d <= 0) fail(errc::shape_mismatch, "tensor extents must be positive, got " + shape_str(s));
  Tensor t;
  t.st_ = std::make_shared<Storage>();
  t.st_->dtype = dt;
  t.shape_ = std::move(s);
  t.numel_ = shape_numel(t.shape_);
  if (dt == DType::f64)
    t.st_->d.resize(static_cast<size_t>(t.numel_));
  else
    t.st_->f.resize(static_cast<size_t>(t.numel_));
  return t;
}

Tensor Tensor::zeros(Shape s, DType dt) { return full(std::move(s), 0.0, dt); }

Tensor Tensor::full(Shape s, double v, DType dt) {
  Tensor t = uninit(std::move(s), dt);
  if (dt == DType::f64)
    std::fill(t.st_->d.begin(), t.st_->d.end(), v);
  else
    std::fill(t.st_->f.begin(), t.st_->f.end(), static_cast<float>(v));
  return t;
}

Tensor Tensor::from(Shape s, const std::vector<double>& vals, DType dt) {
  Tensor t = uninit(std::move(s), dt);
  if (static_cast<int64_t>(vals.size()) != t.numel())
    fail(errc::shape_mismatch, "value count does not match shape " + shape_str(t.shape()));
  if (dt == DType::f64)
    t.st_->d = vals;
  else
    for (size_t i = 0; i < vals.size(); ++i) t.st_->f[i] = static_cast<float>(vals[i]);
  return t;
}

Tensor Tensor::scalar(double v, DType dt) { return full({1}, v, dt); }

int64_t Tensor::dim(int i) const {
  int r = rank();
  if (i < 0) i += r;
  if (i < 0 || i >= r) fail(errc::invalid_argument, "axis out of range");
  return shape_[static_cast<size_t>(i)];
}

double Tensor::item() const {
  if (numel() != 1) fail(errc::invalid_argument, "item() requires a single-element tensor");
  return at(0);
}

double Tensor::at(int64_t i) const {
  return st_->dtype == DType::f64 ? st_->d[static_cast<size_t>(i)]
                                  : static_cast<double>(st_->f[static_cast<size_t>(i)]);
}

std::vector<double> Tensor::to_vector() const {
  if (st_->dtype == DType::f64) return st_->d;
  std::vector<double> out(st_->f.begin(), st_->f.end());
  return out;
}

void Tensor::mutable_values(const std::vector<double>& vals) {
  if (static_cast<int64_t>(vals.size()) != numel())
    fail(errc::shape_mismatch, "mutable_values: size mismatch");
  if (st_->dtype == DType::f64)
    st_->d = vals;
  else
    for (size_t i = 0; i < vals.size(); ++i) st_->f[i] = static_cast<float>(vals[i]);
}

Tensor alias_with_shape(const Tensor& t, Shape s) {
  if (shape_numel(s) != t.numel())
    fail(errc::shape_mismatch,
         "reshape " + shape_str(t.shape()) + " -> " + shape_str(s) + ": element count differs");
  Tensor v = t;
  v.shape_ = std::move(s);
  v.node_ = -1;
  v.epoch_ = 0;
  v.requires_grad_ = false;
  return v;
}

bool Tensor::tracked() const {
  if (!st_) return false;
  if (requires_grad_) return true;
  GradTape* t = GradTape::active();
  return t && epoch_ == t->epoch() && node_ >= 0;
}

void check_same_dtype(const Tensor& a, const Tensor& b, const char* what) {
  if (a.dtype() != b.dtype())
    fail(errc::invalid_argument, std::string(what) + ": mixed dtypes are not supported");
}

// ---------------------------------------------------------------------------
// GradTape
// ---------------------------------------------------------------------------

GradTape::GradTape() : epoch_(g_epoch_counter.fetch_add(1)) { g_tape_stack.push_back(this); }

GradTape::~GradTape() { g_tape_stack.pop_back(); }

GradTape* GradTape::active() { return g_tape_stack.empty() ? nullptr : g_tape_stack.back(); }

NoGradGuard::NoGradGuard() { g_tape_stack.push_back(nullptr); }
NoGradGuard::~NoGradGuard() { g_tape_stack.pop_back(); }

int GradTape::record(std::vector<int> parents, BackwardFn fn) {
  nodes_.push_back(Node{std::move(parents), std::move(fn)});
  return static_cast<int>(nodes_.size()) - 1;
}

int GradTape::leaf_node(const Tensor& t) {
  auto it = leaves_.find(t.storage_key());
  if (it != leaves_.end()) return it->second;
  int id = record({}, nullptr);
  leaves_.emplace(t.storage_key(), id);
  return id;
}

int GradTape::node_of(const Tensor& t) {
  if (t.epoch_ == epoch_ && t.node_ >= 0) return t.node_;
  if (t.requires_grad_) return leaf_node(t);
  return -1;
}

namespace {
// Unrecorded elementwise accumulate used only during reverse accumulation.
void accumulate(Tensor& into, const Tensor& g) {
  if (!into.defined()) {
    into = g;
    return;
  }
  if (into.numel() != g.numel())
    fail(errc::shape_mismatch, "gradient accumulation shape mismatch");
  Tensor sum = Tensor::uninit(into.shape(), into.dtype());
  int64_t n = into.numel();
  if (into.dtype() == DType::f64) {
    const double* a = into.f64();
    const double* b = g.f64();
    double* o = sum.f64_raw();
    for (int64_t i = 0; i < n; ++i) o[i] = a[i] + b[i];
  } else {
    const float* a = into.f32();
    const float* b = g.f32();
    float* o = sum.f32_raw();
    for (int64_t i = 0; i < n; ++i) o[i] = a[i] + b[i];
  }
  into = sum;
}
}  // namespace

Gradients GradTape::backward(const Tensor& root) {
  if (!root.defined() || root.numel() != 1)
    fail(errc::invalid_argument, "backward: root must be a scalar tensor");
  if (root.epoch_ != epoch_ || root.node_ < 0)
    fail(errc::invalid_argument, "backward: root was not produced under this tape");

  NoGradGuard frozen;  // closures may call ops without re-recording

  Gradients out;
  out.by_node_.resize(nodes_.size());
  out.leaves_ = leaves_;
  out.by_node_[static_cast<size_t>(root.node_)] = Tensor::full({1}, 1.0, root.dtype());

  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Tensor& g = out.by_node_[static_cast<size_t>(i)];
    if (!g.defined()) continue;
    const Node& node = nodes_[static_cast<size_t>(i)];
    if (!node.fn) continue;  // leaf
    std::vector<Tensor> pg = node.fn(g);
    if (pg.size() != node.parents.size())
      fail(errc::invalid_argument, "backward closure returned wrong gradient count");
    for (size_t k = 0; k < pg.size(); ++k) {
      int p = node.parents[k];
      if (p < 0 || !pg[k].defined()) continue;
      accumulate(out.by_node_[static_cast<size_t>(p)], pg[k]);
    }
    g = Tensor();  // release intermediate gradient memory
  }
  return out;
}

Tensor Gradients::grad(const Tensor& param) const {
  auto it = leaves_.find(param.storage_key());
  if (it == leaves_.end()) return Tensor();
  return by_node_[static_cast<size_t>(it->second)];
}

Tensor finish_op(Tensor out, std::initializer_list<const Tensor*> ins, BackwardFn fn) {
  GradTape* tape = GradTape::active();
  if (!tape) return out;
  bool any = false;
  for (const Tensor* t : ins)
    if (t->tracked()) {
      any = true;
      break;
    }
  if (!any) return out;
  std::vector<int> parents;
  parents.reserve(ins.size());
  for (const Tensor* t : ins) parents.push_back(tape->node_of(*t));
  out.node_ = tape->record(std::move(parents), std::move(fn));
  out.epoch_ = tape->epoch();
  return out;
}

}  // namespace pntm
