#include "kneejerk/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kneejerk/error.hpp"

namespace kj {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::var: return "var";
    case NodeKind::constant: return "const";
    case NodeKind::sum: return "sum";
    case NodeKind::prod: return "prod";
    case NodeKind::pow: return "pow";
  }
  return "?";
}

NodeSpec var(std::size_t index) {
  NodeSpec n;
  n.kind = NodeKind::var;
  n.index = index;
  return n;
}

NodeSpec constant(double c) {
  NodeSpec n;
  n.kind = NodeKind::constant;
  n.value = c;
  return n;
}

NodeSpec sum(std::vector<NodeSpec> children) {
  NodeSpec n;
  n.kind = NodeKind::sum;
  n.children = std::move(children);
  return n;
}

NodeSpec prod(std::vector<NodeSpec> children) {
  NodeSpec n;
  n.kind = NodeKind::prod;
  n.children = std::move(children);
  return n;
}

NodeSpec pow(NodeSpec base, double exponent) {
  NodeSpec n;
  n.kind = NodeKind::pow;
  n.value = exponent;
  n.children.push_back(std::move(base));
  return n;
}

// Post-order tape: every node appears after all of its children, so a single
// forward sweep computes log-values and a reverse sweep propagates adjoints.
struct Expr::Tape {
  struct Node {
    NodeKind kind;
    std::size_t index;
    double value;  // log c for constants, exponent for pow
    std::size_t first_child;
    std::size_t child_count;
  };

  std::size_t dimension = 0;
  NodeSpec spec;
  std::vector<Node> nodes;
  std::vector<std::size_t> child_ids;
  std::vector<std::string> paths;
};

namespace {

void validate(const NodeSpec& n, std::size_t dimension, const std::string& path) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("invalid " + std::string(to_string(n.kind)) + " node at " + path + ": " +
                          what);
  };
  switch (n.kind) {
    case NodeKind::var:
      if (n.index >= dimension) {
        fail("index " + std::to_string(n.index) + " out of range for dimension " +
             std::to_string(dimension));
      }
      if (!n.children.empty()) fail("variables take no children");
      break;
    case NodeKind::constant:
      if (!(n.value > 0.0) || !std::isfinite(n.value)) {
        std::ostringstream os;
        os << "constant must be positive and finite, got " << n.value;
        fail(os.str());
      }
      if (!n.children.empty()) fail("constants take no children");
      break;
    case NodeKind::sum:
    case NodeKind::prod:
      if (n.children.empty()) fail("needs at least one child");
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        validate(n.children[i], dimension, path + ".args[" + std::to_string(i) + "]");
      }
      break;
    case NodeKind::pow:
      if (!(n.value > 0.0) || !std::isfinite(n.value)) {
        std::ostringstream os;
        os << "exponent must be positive and finite, got " << n.value;
        fail(os.str());
      }
      if (n.children.size() != 1) fail("needs exactly one child");
      validate(n.children.front(), dimension, path + ".arg");
      break;
  }
}

std::size_t compile(const NodeSpec& n, const std::string& path, Expr::Tape& tape) {
  std::vector<std::size_t> kids;
  kids.reserve(n.children.size());
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    const std::string child_path =
        n.kind == NodeKind::pow ? path + ".arg" : path + ".args[" + std::to_string(i) + "]";
    kids.push_back(compile(n.children[i], child_path, tape));
  }
  Expr::Tape::Node node{};
  node.kind = n.kind;
  node.index = n.index;
  node.value = n.kind == NodeKind::constant ? std::log(n.value) : n.value;
  node.first_child = tape.child_ids.size();
  node.child_count = kids.size();
  tape.child_ids.insert(tape.child_ids.end(), kids.begin(), kids.end());
  tape.nodes.push_back(node);
  tape.paths.push_back(path);
  return tape.nodes.size() - 1;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Tape> tape) : tape_(std::move(tape)) {}

Expr Expr::build(NodeSpec root, std::size_t dimension) {
  if (dimension == 0) throw ValidationError("expression dimension must be at least 1");
  validate(root, dimension, "root");
  auto tape = std::make_shared<Tape>();
  tape->dimension = dimension;
  compile(root, "root", *tape);
  tape->spec = std::move(root);
  return Expr(std::move(tape));
}

std::size_t Expr::dimension() const { return tape_->dimension; }
const NodeSpec& Expr::spec() const { return tape_->spec; }
std::size_t Expr::node_count() const { return tape_->nodes.size(); }

bool operator==(const Expr& a, const Expr& b) {
  return a.dimension() == b.dimension() && a.spec() == b.spec();
}

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void check_size(const Expr& e, std::size_t got) {
  if (got != e.dimension()) {
    throw ValidationError("point has " + std::to_string(got) + " coordinates, expression has " +
                          std::to_string(e.dimension()));
  }
}

}  // namespace

LogEval eval_log_coords(const Expr& e, std::span<const double> log_x) {
  check_size(e, log_x.size());
  const Expr::Tape& t = *e.tape_;
  const std::size_t count = t.nodes.size();
  std::vector<double> lv(count);

  for (std::size_t k = 0; k < count; ++k) {
    const auto& nd = t.nodes[k];
    const std::size_t* kids = t.child_ids.data() + nd.first_child;
    double v = 0.0;
    switch (nd.kind) {
      case NodeKind::var: v = log_x[nd.index]; break;
      case NodeKind::constant: v = nd.value; break;
      case NodeKind::pow: v = nd.value * lv[kids[0]]; break;
      case NodeKind::prod:
        for (std::size_t c = 0; c < nd.child_count; ++c) v += lv[kids[c]];
        break;
      case NodeKind::sum: {
        double top = neg_inf;
        for (std::size_t c = 0; c < nd.child_count; ++c) top = std::max(top, lv[kids[c]]);
        if (std::isinf(top)) {
          v = top;
          break;
        }
        double acc = 0.0;
        for (std::size_t c = 0; c < nd.child_count; ++c) acc += std::exp(lv[kids[c]] - top);
        v = top + std::log(acc);
        break;
      }
    }
    if (std::isnan(v)) {
      throw EvaluationError("evaluation produced NaN at " + std::string(to_string(nd.kind)) +
                            " node " + t.paths[k]);
    }
    lv[k] = v;
  }

  LogEval out;
  out.w = lv.back();
  out.g.assign(t.dimension, 0.0);
  if (out.w == neg_inf) return out;

  // Reverse sweep. A node with log-value -inf below a finite root always sits
  // under a sum that gives it weight 0, so its adjoint is 0 as well.
  std::vector<double> adj(count, 0.0);
  adj.back() = 1.0;
  for (std::size_t k = count; k-- > 0;) {
    const double a = adj[k];
    if (a == 0.0) continue;
    const auto& nd = t.nodes[k];
    const std::size_t* kids = t.child_ids.data() + nd.first_child;
    switch (nd.kind) {
      case NodeKind::var: out.g[nd.index] += a; break;
      case NodeKind::constant: break;
      case NodeKind::pow: adj[kids[0]] += nd.value * a; break;
      case NodeKind::prod:
        for (std::size_t c = 0; c < nd.child_count; ++c) adj[kids[c]] += a;
        break;
      case NodeKind::sum:
        for (std::size_t c = 0; c < nd.child_count; ++c) {
          const double lc = lv[kids[c]];
          if (lc != neg_inf) adj[kids[c]] += a * std::exp(lc - lv[k]);
        }
        break;
    }
  }
  return out;
}

LogEval eval_log(const Expr& e, std::span<const double> x) {
  check_size(e, x.size());
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
      std::ostringstream os;
      os << "eval_log requires a point of the open orthant; x[" << i << "] = " << x[i];
      throw DomainError(os.str());
    }
    u[i] = std::log(x[i]);
  }
  return eval_log_coords(e, u);
}

LogEval eval_log_u(const Expr& e, std::span<const double> u) {
  check_size(e, u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) {
      throw DomainError("eval_log_u requires finite log-coordinates; u[" + std::to_string(i) +
                        "] is not finite");
    }
  }
  return eval_log_coords(e, u);
}

LogEval eval_log_closed(const Expr& e, std::span<const double> x) {
  check_size(e, x.size());
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || !std::isfinite(x[i])) {
      std::ostringstream os;
      os << "coordinate x[" << i << "] = " << x[i] << " is outside the closed orthant";
      throw DomainError(os.str());
    }
    u[i] = x[i] == 0.0 ? neg_inf : std::log(x[i]);
  }
  LogEval r = eval_log_coords(e, u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) r.g[i] = 0.0;
  }
  return r;
}

Eigen::MatrixXd hessian_log_u(const Expr& e, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw ValidationError("hessian step must be positive");
  check_size(e, x.size());
  const std::size_t n = e.dimension();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
      throw DomainError("hessian_log_u requires a point of the open orthant");
    }
    u[i] = std::log(x[i]);
  }
  Eigen::MatrixXd H(n, n);
  std::vector<double> probe = u;
  for (std::size_t i = 0; i < n; ++i) {
    probe[i] = u[i] + h;
    const LogEval up = eval_log_coords(e, probe);
    probe[i] = u[i] - h;
    const LogEval down = eval_log_coords(e, probe);
    probe[i] = u[i];
    for (std::size_t j = 0; j < n; ++j) H(i, j) = (up.g[j] - down.g[j]) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

}  // namespace kj
