#include "srs/serialize.hpp"

#include <string>

#include "srs/error.hpp"

namespace srs {

namespace {

Json matrix_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::format, std::string("JSON object is missing '") + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) fail(ErrorKind::format, std::string(what) + " must be a number");
  return j.get<double>();
}

Vector vector_from(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    fail(ErrorKind::format, std::string(what) + " must be an array of length " + std::to_string(n));
  }
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

Matrix matrix_from(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    fail(ErrorKind::format, std::string(what) + " must have " + std::to_string(n) + " rows");
  }
  Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    a.row(static_cast<Eigen::Index>(i)) = vector_from(j[i], n, what).transpose();
  }
  return a;
}

std::size_t dimension(const Json& j) {
  const Json& n = field(j, "n");
  if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) {
    fail(ErrorKind::format, "'n' must be a positive integer");
  }
  return n.get<std::size_t>();
}

// Semantic violations inside a well-formed document are format errors too.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) fail(ErrorKind::format, e.what());
    throw;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, e.what());
  }
}

}  // namespace

Json to_json(const ModelDescriptor& m) {
  Json j;
  j["variant"] = std::string(m.variant_name());
  j["n"] = m.dim();
  if (const auto* ising = std::get_if<IsingModel>(&m.model)) {
    j["J"] = matrix_json(ising->couplings());
    j["h"] = vector_json(ising->fields());
  } else if (const auto* g = std::get_if<GaussianModel>(&m.model)) {
    j["mu"] = vector_json(g->mean());
    j["theta"] = matrix_json(g->precision());
  } else {
    const auto& p = std::get<Phi4Model>(m.model);
    j["alpha"] = p.alpha();
    j["beta"] = p.beta();
    j["gamma"] = p.gamma();
    Json edges = Json::array();
    for (const Edge& e : p.edges()) edges.push_back(Json::array({e.a, e.b}));
    j["edges"] = std::move(edges);
  }
  j["qoi_kind"] = std::string(to_string(m.qoi_kind));
  return j;
}

ModelDescriptor model_from_json(const Json& j) {
  return guarded([&]() -> ModelDescriptor {
    const std::string variant = field(j, "variant").get<std::string>();
    const std::size_t n = dimension(j);
    const QoiKind kind = qoi_kind_from_string(field(j, "qoi_kind").get<std::string>());
    if (variant == "ising") {
      require(kind == QoiKind::moments12, "Ising models conserve moments12");
      return IsingModel(matrix_from(field(j, "J"), n, "J"), vector_from(field(j, "h"), n, "h"));
    }
    if (variant == "gaussian") {
      return {GaussianModel(vector_from(field(j, "mu"), n, "mu"),
                            matrix_from(field(j, "theta"), n, "theta")),
              kind};
    }
    if (variant == "phi4") {
      require(kind == QoiKind::phi4_stats, "Phi4 models conserve phi4_stats");
      std::vector<Edge> edges;
      for (const Json& e : field(j, "edges")) {
        if (!e.is_array() || e.size() != 2) fail(ErrorKind::format, "edges must be [a, b] pairs");
        auto a = e[0].get<std::uint32_t>(), b = e[1].get<std::uint32_t>();
        if (a > b) std::swap(a, b);
        edges.push_back({a, b});
      }
      return Phi4Model(n, number(field(j, "alpha"), "alpha"), number(field(j, "beta"), "beta"),
                       number(field(j, "gamma"), "gamma"), std::move(edges));
    }
    fail(ErrorKind::format, "unknown model variant '" + variant + "'");
  });
}

Json to_json(const QoIRecord& q) {
  Json j;
  j["kind"] = std::string(to_string(q.kind()));
  j["tolerance"] = q.tolerance;
  if (const auto* m = std::get_if<Moments>(&q.payload)) {
    j["m1"] = vector_json(m->m1);
    j["m2"] = matrix_json(m->m2);
  } else if (const auto* p = std::get_if<Phi4Stats>(&q.payload)) {
    j["q1"] = p->q1;
    j["q2"] = p->q2;
    j["q3"] = p->q3;
  } else {
    const auto& t = std::get<TemperatureTarget>(q.payload);
    j["kelvin"] = t.kelvin;
    j["masses"] = t.spec.masses;
    j["n_dim"] = t.spec.n_dim;
    j["n_fix_dofs"] = t.spec.n_fix_dofs;
    j["boltzmann"] = t.spec.boltzmann;
    j["velocity_unit"] = t.spec.velocity_unit;
  }
  return j;
}

QoIRecord qoi_from_json(const Json& j) {
  return guarded([&]() -> QoIRecord {
    QoIRecord q;
    q.tolerance = number(field(j, "tolerance"), "tolerance");
    require(q.tolerance > 0.0, "QoI tolerance must be positive");
    switch (qoi_kind_from_string(field(j, "kind").get<std::string>())) {
      case QoiKind::moments12: {
        const Json& m1 = field(j, "m1");
        if (!m1.is_array() || m1.empty()) fail(ErrorKind::format, "m1 must be a non-empty array");
        Moments m{vector_from(m1, m1.size(), "m1"), matrix_from(field(j, "m2"), m1.size(), "m2")};
        require(m.m2 == m.m2.transpose(), "m2 must be symmetric");
        q.payload = std::move(m);
        break;
      }
      case QoiKind::phi4_stats:
        q.payload = Phi4Stats{number(field(j, "q1"), "q1"), number(field(j, "q2"), "q2"),
                              number(field(j, "q3"), "q3")};
        break;
      case QoiKind::temperature: {
        TemperatureTarget t;
        t.kelvin = number(field(j, "kelvin"), "kelvin");
        t.spec.masses = field(j, "masses").get<std::vector<double>>();
        t.spec.n_dim = field(j, "n_dim").get<int>();
        t.spec.n_fix_dofs = field(j, "n_fix_dofs").get<int>();
        t.spec.boltzmann = number(field(j, "boltzmann"), "boltzmann");
        t.spec.velocity_unit = number(field(j, "velocity_unit"), "velocity_unit");
        require(!t.spec.masses.empty(), "temperature record needs masses");
        q.payload = std::move(t);
        break;
      }
    }
    return q;
  });
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::format, std::string("invalid JSON: ") + e.what());
  }
}

std::string dump(const Json& j, int indent) { return j.dump(indent); }

}  // namespace srs
