#include "levijet/lie_core.hpp"

#include <sstream>
#include <stdexcept>

namespace levijet {

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

std::string tuple_witness(std::initializer_list<int> zero_based) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (int v : zero_based) {
    if (!first) os << ",";
    os << (v + 1);
    first = false;
  }
  os << ")";
  return os.str();
}

}  // namespace

void require_shapes(const StructureData& data) {
  if (data.m < 1 || data.m > data.n) {
    throw std::invalid_argument("StructureData: need 1 <= m <= n");
  }
  const auto m = static_cast<std::size_t>(data.m);
  const auto r = static_cast<std::size_t>(data.n - data.m);
  if (data.c.size() != m) throw std::invalid_argument("StructureData: c outer size != m");
  for (const auto& plane : data.c) {
    if (plane.size() != m) throw std::invalid_argument("StructureData: c mid size != m");
    for (const auto& row : plane) {
      if (row.size() != m) throw std::invalid_argument("StructureData: c inner size != m");
    }
  }
  if (data.a.size() != m) throw std::invalid_argument("StructureData: a outer size != m");
  for (const auto& plane : data.a) {
    if (plane.size() != r) throw std::invalid_argument("StructureData: a mid size != n-m");
    for (const auto& row : plane) {
      if (row.size() != r) throw std::invalid_argument("StructureData: a inner size != n-m");
    }
  }
}

std::vector<Mat> adjoint_matrices(const StructureData& data) {
  require_shapes(data);
  std::vector<Mat> ads;
  ads.reserve(data.m);
  for (int i = 0; i < data.m; ++i) {
    Mat ad = Mat::Zero(data.m, data.m);
    for (int j = 0; j < data.m; ++j) {
      for (int k = 0; k < data.m; ++k) ad(k, j) = data.c[i][j][k];
    }
    ads.push_back(std::move(ad));
  }
  return ads;
}

std::vector<Mat> rho_matrices(const StructureData& data) {
  require_shapes(data);
  const int r = data.complement_dim();
  std::vector<Mat> rhos;
  rhos.reserve(data.m);
  for (int i = 0; i < data.m; ++i) {
    Mat rho = Mat::Zero(r, r);
    for (int al = 0; al < r; ++al) {
      for (int be = 0; be < r; ++be) rho(be, al) = data.a[i][al][be];
    }
    rhos.push_back(std::move(rho));
  }
  return rhos;
}

ValidationReport validate_structure(const StructureData& data) {
  require_shapes(data);
  ValidationReport report;

  CheckResult anti{"c antisymmetric", true, ""};
  for (int i = 0; i < data.m && anti.passed; ++i) {
    for (int j = 0; j < data.m && anti.passed; ++j) {
      for (int k = 0; k < data.m; ++k) {
        if (data.c[i][j][k] != -data.c[j][i][k]) {
          anti.passed = false;
          anti.witness = tuple_witness({i, j, k});
          break;
        }
      }
    }
  }
  report.checks.push_back(anti);

  CheckResult jacobi{"c Jacobi identity", true, ""};
  for (int i = 0; i < data.m && jacobi.passed; ++i) {
    for (int j = 0; j < data.m && jacobi.passed; ++j) {
      for (int k = 0; k < data.m && jacobi.passed; ++k) {
        for (int v = 0; v < data.m; ++v) {
          Rational sum = 0;
          for (int u = 0; u < data.m; ++u) {
            sum += data.c[i][j][u] * data.c[u][k][v];
            sum += data.c[j][k][u] * data.c[u][i][v];
            sum += data.c[k][i][u] * data.c[u][j][v];
          }
          if (sum != 0) {
            jacobi.passed = false;
            jacobi.witness = tuple_witness({i, j, k, v});
            break;
          }
        }
      }
    }
  }
  report.checks.push_back(jacobi);

  CheckResult rep{"a representation property", true, ""};
  if (anti.passed && jacobi.passed) {
    const auto rhos = rho_matrices(data);
    const int r = data.complement_dim();
    for (int i = 0; i < data.m && rep.passed; ++i) {
      for (int j = 0; j < data.m && rep.passed; ++j) {
        Mat lhs = rhos[i] * rhos[j] - rhos[j] * rhos[i];
        for (int k = 0; k < data.m; ++k) lhs -= data.c[i][j][k] * rhos[k];
        for (int be = 0; be < r && rep.passed; ++be) {
          for (int al = 0; al < r; ++al) {
            if (lhs(be, al) != 0) {
              rep.passed = false;
              rep.witness = tuple_witness({i, j}) + " entry " + tuple_witness({al, be});
              break;
            }
          }
        }
      }
    }
  } else {
    rep.passed = false;
    rep.witness = "skipped: bracket checks failed";
  }
  report.checks.push_back(rep);

  CheckResult kill{"Killing form negative definite", true, ""};
  if (anti.passed && jacobi.passed) {
    const Mat b = killing_form(data);
    const Mat neg = -b;
    if (!is_positive_definite_symmetric(neg)) {
      kill.passed = false;
      kill.witness = "-B fails Sylvester positivity";
    }
  } else {
    kill.passed = false;
    kill.witness = "skipped: bracket checks failed";
  }
  report.checks.push_back(kill);

  return report;
}

Mat killing_form(const StructureData& data) {
  require_shapes(data);
  Mat b = Mat::Zero(data.m, data.m);
  for (int i = 0; i < data.m; ++i) {
    for (int j = 0; j < data.m; ++j) {
      Rational sum = 0;
      for (int k = 0; k < data.m; ++k) {
        for (int l = 0; l < data.m; ++l) sum += data.c[i][k][l] * data.c[j][l][k];
      }
      b(i, j) = sum;
    }
  }
  return b;
}

CasimirElement casimir_element(const StructureData& data) {
  CasimirElement cas;
  cas.gram = killing_form(data);
  try {
    cas.dual_coeffs = inverse(cas.gram);
  } catch (const std::domain_error&) {
    throw std::domain_error("casimir_element: Killing form singular (not semisimple)");
  }
  return cas;
}

Mat casimir_operator(const CasimirElement& cas, const std::vector<Mat>& generators) {
  const int m = static_cast<int>(cas.gram.rows());
  if (static_cast<int>(generators.size()) != m) {
    throw std::invalid_argument("casimir_operator: generator count != m");
  }
  if (generators.empty()) return Mat();
  const auto dim = generators[0].rows();
  Mat gamma = Mat::Zero(dim, dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (cas.dual_coeffs(i, j) == 0) continue;
      gamma += cas.dual_coeffs(i, j) * (generators[i] * generators[j]);
    }
  }
  return gamma;
}

}  // namespace levijet
