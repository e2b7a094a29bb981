#include <stdio.h>
#include <string.h>

#include "fano14.h"

int main(void) {
    Fano14Options opts = fano14_options_default();
    opts.samples = 0;
    Fano14Report *report = NULL;
    if (fano14_verify(&opts, "delta_d", NULL, &report) != FANO14_OK) {
        fprintf(stderr, "verify: %s\n", fano14_last_error());
        return 2;
    }
    char *text = fano14_report_text(report);
    int found = strstr(text, "delta_bound = 56/45 [expected 56/45] PASS") != NULL;
    int verdict = fano14_report_verdict(report);
    fano14_string_free(text);
    fano14_report_free(report);
    if (fano14_verify(&opts, "missing", NULL, &report) != FANO14_INVALID_ARGUMENT || report != NULL) {
        return 3;
    }
    return found && verdict == 1 ? 0 : 1;
}
