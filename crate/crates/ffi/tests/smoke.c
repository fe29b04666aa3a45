#include <stdio.h>
#include <string.h>
#include "stochsym.h"

static const char *PROBLEM =
    "[variables]\nstate = [\"y\"]\ntime = \"t\"\nwiener = [\"w\"]\n"
    "[sde]\ncalculus = \"ito\"\ndrift = [\"exp(-y) - 1/2*exp(-2*y)\"]\nnoise = [[\"exp(-y)\"]]\n"
    "[symmetry]\nphi = [\"exp(-y)\"]\n";

int main(void) {
    StochsymProblem *p = NULL;
    StochsymReport *r = NULL;
    if (stochsym_problem_from_toml(PROBLEM, NULL, &p) != STOCHSYM_STATUS_OK) {
        fprintf(stderr, "%s\n", stochsym_last_error());
        return 10;
    }
    if (stochsym_run(p, "reduce", &r) != STOCHSYM_STATUS_OK) {
        fprintf(stderr, "%s\n", stochsym_last_error());
        return 11;
    }
    char *text = stochsym_report_text(r);
    int ok = strstr(text, "drift = 1\n") != NULL && strstr(text, "noise = 1\n") != NULL;
    printf("%s", text);
    stochsym_string_free(text);
    int verdict = stochsym_report_verdict(r);
    stochsym_report_free(r);
    stochsym_problem_free(p);

    StochsymExpr *e = NULL;
    if (stochsym_expr_parse("x +", "x", "t", "w", &e) != STOCHSYM_STATUS_PARSE_ERROR) return 12;
    printf("error: %s\n", stochsym_last_error());
    return ok && verdict == 0 ? 0 : 13;
}
