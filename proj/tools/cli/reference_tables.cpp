#include "reference_tables.hpp"

#include <limits>
#include <map>
#include <stdexcept>

namespace satdesign::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference set 1: Poisson regression, A-optimal on [0, inf), theta1 = 1.
ReferenceTable set1() {
    ReferenceTable t{1, "A-optimal designs, Poisson regression on [0, inf)", "poisson", "A", 0.0, kInf, 1e-3, 2e-3, {}};
    t.rows = {
        {"theta2=-1", {1.0, -1.0}, {0.0, 2.261}, {0.444, 0.556}, {}},
        {"theta2=-2", {1.0, -2.0}, {0.0, 1.193}, {0.320, 0.680}, {}},
    };
    return t;
}

// Reference set 2: Emax, A-optimal on [0, 150].
ReferenceTable set2() {
    ReferenceTable t{2, "A-optimal designs, Emax model on [0, 150]", "emax", "A", 0.0, 150.0, 1e-3, 2e-3, {}};
    t.rows = {
        {"theta2=7/15,theta3=15", {0.0, 7.0 / 15.0, 15.0}, {0.0, 12.50, 150.0}, {0.250, 0.500, 0.250}, {}},
        {"theta2=7/15,theta3=25", {0.0, 7.0 / 15.0, 25.0}, {0.0, 18.75, 150.0}, {0.250, 0.500, 0.250}, {}},
        {"theta2=10/15,theta3=25", {0.0, 10.0 / 15.0, 25.0}, {0.0, 18.75, 150.0}, {0.250, 0.500, 0.250}, {}},
    };
    return t;
}

// Reference set 4: LINEXP, A-optimal on [0, 1], theta = (1, theta2, theta3, 1).
ReferenceTable set4() {
    ReferenceTable t{4, "A-optimal designs, LINEXP model on [0, 1]", "linexp", "A", 0.0, 1.0, 1e-3, 2e-3, {}};
    t.rows = {
        {"theta2=0.5,theta3=-1", {1.0, 0.5, -1.0, 1.0}, {0.0, 0.220, 0.717, 1.0}, {0.156, 0.324, 0.344, 0.176}, {}},
        {"theta2=1,theta3=-1", {1.0, 1.0, -1.0, 1.0}, {0.0, 0.220, 0.717, 1.0}, {0.151, 0.319, 0.349, 0.181}, {}},
        {"theta2=1,theta3=-2", {1.0, 1.0, -2.0, 1.0}, {0.0, 0.195, 0.681, 1.0}, {0.146, 0.315, 0.355, 0.184}, {}},
    };
    return t;
}

// Reference set 5: exponential regression with two terms on [0, inf),
// theta = (1, 1, theta3, theta4); rows 1-3 A-optimal, rows 4-6 e2-optimal.
ReferenceTable set5() {
    ReferenceTable t{5, "A- and e2-optimal designs, exponential regression on [0, inf)", "exponential", "A|e2", 0.0, kInf,
                     2e-3, 2e-3, {}};
    t.rows = {
        {"A,theta3=1,theta4=2", {1.0, 1.0, 1.0, 2.0}, {0.0, 0.275, 1.196, 3.416}, {0.078, 0.178, 0.251, 0.493}, {}},
        {"A,theta3=1,theta4=4", {1.0, 1.0, 1.0, 4.0}, {0.0, 0.170, 0.768, 2.472}, {0.118, 0.261, 0.287, 0.334}, {}},
        {"A,theta3=3,theta4=4", {1.0, 1.0, 3.0, 4.0}, {0.0, 0.172, 0.760, 2.450}, {0.083, 0.199, 0.296, 0.422}, {}},
        {"e2,theta3=1,theta4=2", {1.0, 1.0, 1.0, 2.0}, {0.0, 0.273, 1.197, 3.425}, {0.054, 0.124, 0.200, 0.623}, {}},
        {"e2,theta3=1,theta4=4", {1.0, 1.0, 1.0, 4.0}, {0.0, 0.168, 0.769, 2.492}, {0.033, 0.082, 0.201, 0.683}, {}},
        {"e2,theta3=3,theta4=4", {1.0, 1.0, 3.0, 4.0}, {0.0, 0.168, 0.769, 2.492}, {0.033, 0.082, 0.201, 0.683}, {}},
    };
    return t;
}

// Reference set 6: polynomial of degree 3 with lambda(x) = 1 - x^2 on
// [-1, 1], compound criterion with p = -1 and uniform beta; the efficiency
// triple lists the A-efficiencies for degrees 1, 2, 3.
ReferenceTable set6() {
    ReferenceTable t{6, "compound designs, polynomial degree 3 with lambda = 1 - x^2 on [-1, 1]", "polynomial", "compound", -1.0,
                     1.0, 1e-3, 2e-3, {}};
    t.rows = {
        {"p'=0", {0.0}, {-0.860, -0.346, 0.346, 0.860}, {0.263, 0.237, 0.237, 0.263}, {0.692, 0.745, 0.902}},
        {"p'=-1", {-1.0}, {-0.854, -0.343, 0.343, 0.854}, {0.268, 0.232, 0.232, 0.268}, {0.701, 0.753, 0.879}},
        {"p'=-3", {-3.0}, {-0.846, -0.339, 0.339, 0.846}, {0.273, 0.227, 0.227, 0.273}, {0.714, 0.759, 0.846}},
    };
    return t;
}

} // namespace

const ReferenceTable& reference_table(int id) {
    static const std::map<int, ReferenceTable> tables{{1, set1()}, {2, set2()}, {4, set4()}, {5, set5()}, {6, set6()}};
    return tables.at(id);
}

// Reference set 3: Emax with theta2 = 7/15, theta3 = 25 on [0, 150], c-optimal
// for theta2 approached through Phi_p designs for g_eps.
const EpsilonReferenceTable& epsilon_reference_table() {
    static const EpsilonReferenceTable table{
        "epsilon-sequence errors, Emax c-optimality for theta2 on [0, 150]",
        {0.0, 7.0 / 15.0, 25.0},
        {0.0, 1.0, 0.0},
        0.0,
        150.0,
        {25.0 / 6.0, 150.0},
        {
            {-1.0, 1e-5, 1e-2, 4e-3, 4e-3, 2e-4, 6e-4},
            {-1.0, 1e-6, 1e-3, 4e-4, 4e-4, 2e-5, 6e-5},
            {-1.0, 1e-7, 1e-4, 4e-5, 4e-5, 2e-6, 6e-6},
            {-3.0, 1e-5, 3e-4, 1e-4, 9e-5, 4e-6, 2e-5},
            {-3.0, 1e-6, 8e-6, 3e-6, 3e-6, 5e-8, 5e-7},
            {-3.0, 1e-7, 7e-7, 3e-7, 2e-7, 1e-8, 4e-8},
        },
    };
    return table;
}

} // namespace satdesign::cli
