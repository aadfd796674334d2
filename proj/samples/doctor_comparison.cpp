// One doctor at rate 1/2 or two at rate 1/4, patients arriving at rate 1/3.
#include <iostream>

#include "qmax/experiment.hpp"
#include "qmax/report.hpp"

int main()
{
    const qmax::DoctorTable table = qmax::doctor_scenario(1e6);
    qmax::write_text(std::cout, table);
    return table.passed() ? 0 : 1;
}
