#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greybox/ratfun.hpp"

namespace greybox {

enum class ComponentKind {
    SeriesRL,   // (R + sL)^-1, shunt or branch
    Capacitor,  // sC, shunt only
    ParallelRLC,  // (R + sL)^-1 + sC, shunt only
    Rational,   // user supplied m x m block of rational functions
    Spectrum,   // measured apparatus, no rational model
};

const char* kind_name(ComponentKind kind);

// Row-major m x m block of rational functions.
struct RationalBlock {
    int width = 1;
    std::vector<RationalFunction> entries;
    // Coefficients as written in the network file, kept for serialization.
    std::vector<std::vector<double>> num_coeffs;
    std::vector<std::vector<double>> den_coeffs;

    const RationalFunction& at(int r, int c) const { return entries[static_cast<std::size_t>(r) * width + c]; }
    ComplexMatrix evaluate(Complex s) const;
};

struct Component {
    std::string id;
    ComponentKind kind = ComponentKind::SeriesRL;
    int from = -1;  // node index
    int to = -1;    // node index, -1 for a shunt to reference
    std::map<std::string, double> params;  // R [ohm], L [H], C [F]
    std::optional<RationalBlock> block;    // Rational only
    std::string spectrum_source;           // Spectrum only

    bool is_shunt() const noexcept { return to < 0; }
    int width() const noexcept { return block ? block->width : 1; }
    double param(const std::string& name) const;
};

struct Node {
    std::string id;
    int ports = 1;
};

class NetworkModel {
public:
    std::string name;
    // Unit used for frequencies given on the command line: "hz" or "rads".
    std::string frequency_unit = "hz";

    int add_node(std::string id, int ports = 1);
    void add_component(Component c);
    // Convenience builders used by tests and the oracle.
    void add_shunt(std::string id, int node, ComponentKind kind, std::map<std::string, double> params);
    void add_branch(std::string id, int from, int to, std::map<std::string, double> params);

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    int node_index(const std::string& id) const;
    int component_index(const std::string& id) const;
    const Component& component(const std::string& id) const { return components_[component_index(id)]; }

    int port_count() const;
    int port_offset(int node) const;
    bool has_spectrum_apparatus() const;
    bool is_passive_rlc() const;

    // Throws UsageError naming the first violated invariant.
    void validate() const;

    NetworkModel with_parameter(const std::string& component_id, const std::string& param, double value) const;
    // Multiplies the component admittance by `factor` (R, L divided; C multiplied).
    NetworkModel with_scaled_admittance(const std::string& component_id, double factor) const;

private:
    std::vector<Node> nodes_;
    std::vector<Component> components_;
};

// Admittance y(s) of one component as an m x m block.
RationalBlock component_admittance(const Component& c);

// Analytic dy/drho at s: dy/dR = -(R+sL)^-2, dy/dL = -s (R+sL)^-2, dy/dC = s.
ComplexMatrix param_derivative(const Component& c, const std::string& param, Complex s);

// Y_N (branches only), Y_A (shunts only) and Y_nodal = Y_N + Y_A.
RationalMatrix build_ynetwork(const NetworkModel& net);
RationalMatrix build_yapparatus(const NetworkModel& net);
RationalMatrix build_ynodal(const NetworkModel& net);

// Block diagonal inverse of Y_A; empty when some node has no shunt apparatus.
std::optional<RationalMatrix> build_zapparatus(const NetworkModel& net);

struct WholeSystemModel {
    RationalMatrix matrix;
    // Z_A does not exist ("Z_A-free assembly").
    bool za_free = false;
};

// Z_sys = Z_A (I + Y_N Z_A)^-1 and Y_sys = (I + Y_N Z_A)^-1 Y_N.
RationalMatrix whole_system_impedance(const RationalMatrix& yn, const RationalMatrix& za);
RationalMatrix whole_system_admittance(const RationalMatrix& yn, const RationalMatrix& za);

WholeSystemModel build_zsys(const NetworkModel& net);
WholeSystemModel build_ysys(const NetworkModel& net);

// Z_sys(s) evaluated numerically as Z_A (I + Y_N Z_A)^-1, or Y_nodal^-1
// when Z_A does not exist. Stays accurate on large networks where the
// rational form loses digits.
class ZsysEvaluator {
public:
    explicit ZsysEvaluator(const NetworkModel& net);
    ComplexMatrix operator()(Complex s) const;
    bool za_free() const noexcept { return za_free_; }

private:
    RationalMatrix ynetwork_;
    RationalMatrix ynodal_;
    std::vector<std::pair<int, RationalBlock>> shunts_;  // port offset, summed admittance
    bool za_free_ = false;
};

// d Y_nodal / dy for one component as signed identity blocks.
struct IncidencePattern {
    struct Block {
        int row_node;
        int col_node;
        int sign;
    };
    std::string component;
    int width = 1;
    std::vector<Block> blocks;

    // Port-level N*m x N*m matrix with sign * I_m blocks.
    Eigen::MatrixXd dense(const NetworkModel& net) const;
};

IncidencePattern incidence_pattern(const NetworkModel& net, const std::string& component_id);

}  // namespace greybox
