#include "gcre/config.hpp"

#include "gcre/error.hpp"
#include "gcre/expression.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace gcre {

namespace pt = boost::property_tree;

namespace {

std::vector<double> numbers(const std::string &text, const char *key) {
    std::istringstream is(text);
    std::vector<double> out;
    double v;
    while (is >> v)
        out.push_back(v);
    if (!is.eof())
        throw InvalidInput(fmt::format("config: '{}' expects numbers, got '{}'", key, text));
    return out;
}

template <class T>
T scalar(const pt::ptree &tree, const char *key, T fallback) {
    const auto text = tree.get_optional<std::string>(key);
    if (!text)
        return fallback;
    const auto v = numbers(*text, key);
    if (v.size() != 1)
        throw InvalidInput(fmt::format("config: '{}' expects one number, got '{}'", key, *text));
    if constexpr (std::is_integral_v<T>)
        if (v[0] != std::floor(v[0]))
            throw InvalidInput(fmt::format("config: '{}' expects an integer, got '{}'", key, *text));
    return static_cast<T>(v[0]);
}

ScalarField field(const pt::ptree &t, const std::string &key, const char *fallback) {
    const auto text = t.get<std::string>(key, fallback);
    return expression_field(Expression(text));
}

BoundaryTag parse_tag(const std::string &s) {
    if (s == "dirichlet")
        return BoundaryTag::dirichlet;
    if (s == "neumann")
        return BoundaryTag::neumann;
    if (s == "contact")
        return BoundaryTag::contact;
    throw InvalidInput(fmt::format("config: unknown boundary tag '{}'", s));
}

ReferenceMode parse_reference(const std::string &s) {
    ReferenceMode m;
    if (s.empty() || s == "none")
        return m;
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "analytic") {
        m.kind = ReferenceMode::Kind::analytic;
        m.name = tail;
        if (m.name.empty())
            throw InvalidInput("config: analytic reference needs a name");
        return m;
    }
    if (head == "overkill") {
        m.kind = ReferenceMode::Kind::overkill;
        if (!tail.empty()) {
            try {
                m.factor = std::stol(tail);
            } catch (const std::exception &) {
                throw InvalidInput(fmt::format("config: bad overkill factor '{}'", tail));
            }
        }
        return m;
    }
    throw InvalidInput(fmt::format("config: unknown reference mode '{}'", s));
}

} // namespace

std::array<Index, 2> StudyConfig::subdivisions(Index level) const {
    if (const auto *r = std::get_if<Rectangle>(&problem.geometry)) {
        const auto ny = static_cast<Index>(std::lround(static_cast<double>(level) * r->height / r->width));
        return {level, std::max<Index>(1, ny)};
    }
    return {level, 0};
}

void StudyConfig::validate() const {
    problem.validate();
    if (levels.empty())
        throw InvalidInput("config: no mesh levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] < 1)
            throw InvalidInput("config: mesh levels must be positive");
        if (k > 0 && levels[k] <= levels[k - 1])
            throw InvalidInput("config: mesh levels must be increasing");
    }
    if (reference.kind == ReferenceMode::Kind::overkill) {
        if (reference.factor < 4)
            throw InvalidInput("config: overkill factor must be at least 4");
        const Index finest = levels.back();
        const auto fine = subdivisions(finest);
        for (Index l : levels) {
            const auto s = subdivisions(l);
            if (finest % l != 0 || (s[1] > 0 && fine[1] % s[1] != 0) ||
                (s[1] > 0 && fine[1] / s[1] != finest / l))
                throw InvalidInput("config: overkill needs levels nested in the finest level");
        }
    }
    if (solver.max_iter < 1 || !(solver.tol > 0.0))
        throw InvalidInput("config: solver tol and max_iter must be positive");
}

StudyConfig parse_config(std::istream &is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error &e) {
        throw InvalidInput(fmt::format("config: {}", e.message()));
    }
    StudyConfig c;
    try {
        const pt::ptree empty;
        const auto &prob = tree.get_child("problem", empty);
        const auto &mat = tree.get_child("material", empty);
        const auto &data = tree.get_child("data", empty);
        const auto &study = tree.get_child("study", empty);
        const auto &solver = tree.get_child("solver", empty);

        ProblemSpec &p = c.problem;
        p.kind = parse_problem_kind(prob.get<std::string>("kind"));
        const auto dom = numbers(prob.get<std::string>("domain"), "domain");
        if (p.kind == ProblemKind::obstacle_1d ||
            (p.kind == ProblemKind::linear_poisson && dom.size() == 2 &&
             scalar<int>(prob, "dimension", 1) == 1)) {
            if (dom.size() != 2)
                throw InvalidInput("config: 1D domain is 'a b'");
            p.geometry = Interval{dom[0], dom[1]};
        } else {
            if (dom.size() != 2 && dom.size() != 4)
                throw InvalidInput("config: 2D domain is 'width height [x0 y0]'");
            p.geometry = Rectangle{dom[0], dom[1], dom.size() == 4 ? dom[2] : 0.0,
                                   dom.size() == 4 ? dom[3] : 0.0};
        }
        for (auto [tag, key] : {std::pair{&p.tags.left, "left"}, {&p.tags.right, "right"},
                                {&p.tags.bottom, "bottom"}, {&p.tags.top, "top"}})
            if (auto v = prob.get_optional<std::string>(key))
                *tag = parse_tag(*v);
        const auto orient = prob.get<std::string>("orientation", "below");
        if (orient != "below" && orient != "above")
            throw InvalidInput(fmt::format("config: unknown orientation '{}'", orient));
        p.orientation = orient == "below" ? ConeOrientation::below : ConeOrientation::above;

        if (mat.count("young"))
            p.material = Material::from_young(scalar(mat, "young", 1.0), scalar(mat, "poisson", 0.3));
        else
            p.material = Material{scalar(mat, "lambda", 0.0), scalar(mat, "mu", 1.0)};

        p.body_force = {field(data, "body_force_x", "0"), field(data, "body_force_y", "0")};
        p.traction = {field(data, "traction_x", "0"), field(data, "traction_y", "0")};
        p.dirichlet = {field(data, "dirichlet_x", "0"), field(data, "dirichlet_y", "0")};
        if (auto o = data.get_optional<std::string>("obstacle"))
            p.obstacle = expression_field(Expression(*o));
        p.constraint_curvature = scalar(data, "curvature", 0.0);
        if (auto s = data.get_optional<std::string>("friction"))
            p.friction = expression_field(Expression(*s));

        c.name = study.get<std::string>("name", "study");
        for (double v : numbers(study.get<std::string>("levels", ""), "levels")) {
            if (v != std::floor(v))
                throw InvalidInput("config: levels must be integers");
            c.levels.push_back(static_cast<Index>(v));
        }
        c.reference = parse_reference(study.get<std::string>("reference", "none"));
        c.solver.tol = scalar(solver, "tol", c.solver.tol);
        c.solver.max_iter = scalar(solver, "max_iter", c.solver.max_iter);
        c.output = tree.get<std::string>("output.directory", "out");
    } catch (const pt::ptree_error &e) {
        throw InvalidInput(fmt::format("config: {}", e.what()));
    }
    c.validate();
    return c;
}

StudyConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput(fmt::format("config: cannot open '{}'", path.string()));
    return parse_config(in);
}

} // namespace gcre
