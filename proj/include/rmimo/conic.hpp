#pragma once

#include "rmimo/numerics.hpp"

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace rmimo {

enum class VarField { complex_hermitian, real_symmetric };
enum class ScalarSign { free_sign, nonneg };
enum class SolveStatus { optimal, infeasible, numerical_failure };

struct SolverSettings {
    double eq_tol = 1e-8;
    double psd_tol = 1e-8;
    double duality_gap_tol = 1e-8;
    int max_iterations = 200;
};

/// Canonical-form conic program: maximize a real-linear objective subject to
/// real-linear equalities over Hermitian/symmetric PSD blocks and signed
/// scalars. Matrix coefficients enter as Re tr(A M) with A Hermitian
/// (symmetric for real blocks); complex equalities are entered as two rows.
class ConicProgram {
  public:
    struct Block {
        std::string name;
        int side = 0;
        VarField field = VarField::complex_hermitian;
    };
    struct Scalar {
        std::string name;
        ScalarSign sign = ScalarSign::free_sign;
    };
    struct Row {
        std::map<std::string, MatrixXcd> block_coeffs;
        std::map<std::string, double> scalar_coeffs;
        double rhs = 0.0;
    };

    void add_psd_block(const std::string& name, int side, VarField field);
    void add_scalar(const std::string& name, ScalarSign sign);
    void set_objective_block(const std::string& name, const MatrixXcd& coeff);
    void set_objective_scalar(const std::string& name, double coeff);
    void add_equality(Row row);

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Scalar>& scalars() const { return scalars_; }
    const std::vector<Row>& equalities() const { return equalities_; }
    const Row& objective() const { return objective_; }

    /// Sparse text dump (variable table + coefficient triplets) for offline
    /// cross-checking.
    void dump(std::ostream& os) const;

  private:
    const Block& find_block(const std::string& name) const;
    void check_coeff(const std::string& name, const MatrixXcd& coeff) const;

    std::vector<Block> blocks_;
    std::vector<Scalar> scalars_;
    std::vector<Row> equalities_;
    Row objective_;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    std::map<std::string, MatrixXcd> matrices;
    std::map<std::string, double> scalars;
    double objective_value = 0.0;
    int iterations = 0;
    double rel_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Primal-dual interior-point solve (NT scaling, adaptive centering).
/// Deterministic for identical inputs and settings.
ConicSolution solve(const ConicProgram& program,
                    const SolverSettings& settings = {});

/// T(M) = [[Re M, -Im M], [Im M, Re M]]; M >= 0 iff T(M) >= 0 and
/// tr(A M) = tr(T(A) T(M)) / 2 for Hermitian A, M.
MatrixXd hermitian_embedding(const MatrixXcd& m);

} // namespace rmimo
