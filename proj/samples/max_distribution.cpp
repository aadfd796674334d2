// Simulated maximum of a Geo/Geo/2 line against the predicted law.
#include <iostream>

#include "qmax/experiment.hpp"
#include "qmax/report.hpp"

int main()
{
    const qmax::DiscreteQueueSpec spec{1.0 / 3.0, 0.25, 2, qmax::Discipline::LasDa};
    const auto asym = qmax::extreme_asymptotics(spec);
    const auto summary = qmax::replicate_max(spec, 100000, 400, 7, {qmax::default_jobs()});
    qmax::write_text(std::cout, qmax::compare_prediction(summary, asym));
    qmax::write_text(std::cout, qmax::cdf_table(summary, asym));
}
