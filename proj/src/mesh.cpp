#include "fracstep/mesh.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracstep/csv.hpp"

namespace fracstep {

TimeMesh::TimeMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("TimeMesh: need at least two nodes");
    if (nodes_.front() != 0.0) throw std::invalid_argument("TimeMesh: t_0 must be 0");
    steps_.resize(nodes_.size() - 1);
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
        const double tau = nodes_[j] - nodes_[j - 1];
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("TimeMesh: nodes must be strictly increasing");
        steps_[j - 1] = tau;
    }
}

TimeMesh TimeMesh::from_nodes(std::vector<double> nodes) { return TimeMesh(std::move(nodes)); }

void TimeMesh::save_csv(std::ostream& out) const {
    out << "t\n";
    for (double v : nodes_) out << format_double(v) << "\n";
}

TimeMesh TimeMesh::load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t")
        throw std::invalid_argument("TimeMesh: expected header 't'");
    std::vector<double> nodes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nodes.push_back(std::stod(line));
    }
    return TimeMesh(std::move(nodes));
}

TimeMesh build_graded_mesh(std::size_t n_steps, double grading, double horizon) {
    if (n_steps == 0) throw std::invalid_argument("build_graded_mesh: N must be positive");
    if (!(grading >= 1.0)) throw std::invalid_argument("build_graded_mesh: r must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("build_graded_mesh: T must be positive");

    std::vector<double> nodes(n_steps + 1);
    nodes[0] = 0.0;
    const double n = static_cast<double>(n_steps);
    if (grading == 1.0) {
        for (std::size_t j = 1; j <= n_steps; ++j)
            nodes[j] = (static_cast<double>(j) / n) * horizon;
    } else {
        // exp(r log(j/N)) keeps relative accuracy for the tiny first nodes of
        // strongly graded meshes (t_1 can sit near 1e-18).
        for (std::size_t j = 1; j <= n_steps; ++j)
            nodes[j] = std::exp(grading * std::log(static_cast<double>(j) / n)) * horizon;
    }
    nodes[n_steps] = horizon;
    return TimeMesh::from_nodes(std::move(nodes));
}

double ratio_theta(const TimeMesh& mesh, std::size_t j, std::size_t k) {
    if (j < 1 || k > mesh.num_steps() || j + 1 > k)
        throw std::out_of_range("ratio_theta: need 1 <= j <= k-1 <= N-1");
    return mesh.step(j) / (mesh.t(k) - mesh.t(j - 1));
}

}  // namespace fracstep
