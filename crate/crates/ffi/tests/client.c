#include <stdio.h>

#include "antisparse.h"

int main(void) {
    AntisparseProblem *p = NULL;
    AntisparseReport *r = NULL;
    char msg[256];

    if (antisparse_problem_generate(ANTISPARSE_DICTIONARY_DCT, 10, 15, 3, 0.5, &p) != ANTISPARSE_STATUS_OK) {
        antisparse_last_error_message(msg, sizeof msg);
        fprintf(stderr, "generate: %s\n", msg);
        return 1;
    }
    if (antisparse_solve(p, ANTISPARSE_SOLVER_PGS, 1e-9, 0, &r) != ANTISPARSE_STATUS_OK) {
        antisparse_last_error_message(msg, sizeof msg);
        fprintf(stderr, "solve: %s\n", msg);
        return 1;
    }
    double gap = 0.0;
    bool converged = false;
    size_t n = 0;
    antisparse_report_summary(r, &gap, &converged, NULL, NULL);
    antisparse_report_x(r, NULL, 0, &n);
    printf("converged=%d gap=%g n=%zu\n", converged ? 1 : 0, gap, n);

    if (antisparse_solve(p, 7, 1e-9, 0, &r) != ANTISPARSE_STATUS_INVALID_ARGUMENT) {
        return 1;
    }
    antisparse_report_free(r);
    antisparse_problem_free(p);
    return 0;
}
