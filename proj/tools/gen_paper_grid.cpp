// Regenerates data/paper_discretized.json (the 360-point grid discretization
// of the builtin model, settings at multiples of pi/4).
//
//   gen_paper_grid [output-path] [n-grid]

#include <iostream>
#include <string>

#include "hvlab/discrete_model.hpp"
#include "hvlab/model_io.hpp"

int main(int argc, char** argv) {
    std::string path = argc > 1 ? argv[1] : "data/paper_discretized.json";
    int n_grid = argc > 2 ? std::stoi(argv[2]) : 360;
    try {
        hvlab::DiscreteModel model = hvlab::discretize_paper_model(n_grid);
        hvlab::save_model(model, path);
    } catch (const std::exception& e) {
        std::cerr << "gen_paper_grid: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << path << " (n_grid=" << n_grid << ")\n";
    return 0;
}
