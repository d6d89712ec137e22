#ifndef CRFORGE_MANIFEST_HPP
#define CRFORGE_MANIFEST_HPP

#include "crforge/manifold.hpp"
#include "crforge/reflection.hpp"

#include <memory>
#include <string>
#include <vector>

namespace crforge {

struct ParseError : std::runtime_error {
    int line = 0, col = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

/// Expression AST of the manifest language.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Expr {
    enum class Kind { Num, ImagUnit, Var, Add, Sub, Mul, Div, Pow, Neg, Conj, Im, Re, Abs2, Exp };
    Kind kind;
    mpq_class num;     // Num
    std::string name;  // Var (variable or named series)
    ExprPtr a, b;
    unsigned ipow = 0; // Pow
    int line = 0, col = 0;

    std::string render() const;
};

struct ManifoldDecl {
    std::string name;
    int N = 0, d = 0;
    bool complexified = false;
    std::vector<ExprPtr> exprs;
    int line = 0;
};
struct SeriesDecl {
    std::string name;
    ExprPtr expr;
    int line = 0;
};
struct MapDecl {
    std::string name, src, tgt;
    std::vector<ExprPtr> exprs;
    int line = 0;
};

struct BuiltMap {
    MapGerm germ;
    std::string src, tgt;
};

/// Parsed and fully elaborated manifest: real-form definitions are
/// auto-complexified (conj Z -> zeta), expressions elaborated to Series at
/// the declared order, manifolds normal-formed, maps checked holomorphic.
struct Manifest {
    int order = 10;
    std::vector<ManifoldDecl> manifold_decls;
    std::vector<SeriesDecl> series_decls;
    std::vector<MapDecl> map_decls;

    std::map<std::string, GenericManifold> manifolds;
    std::map<std::string, BuiltMap> maps;

    const GenericManifold& manifold(const std::string& name) const;
    const BuiltMap& map(const std::string& name) const;

    /// Canonical textual form; parse(render()) rebuilds this manifest.
    std::string render() const;
};

Manifest parse_manifest(const std::string& text);

/// Embedded fixture corpus (hyperplane, quadric, twist, nonfinite).
std::vector<std::string> fixture_names();
const std::string& fixture_source(const std::string& name);

} // namespace crforge

#endif
