/* Compiled as C to keep the public header C-clean. */
#include <stdio.h>

#include "marvv/marvv.h"

int main(void) {
    marvv_scenario* s = NULL;
    marvv_scenario* missing = NULL;
    uint64_t hash = 0;
    if (marvv_scenario_reference(&s) != MARVV_OK) return 1;
    if (marvv_scenario_hash(s, &hash) != MARVV_OK || hash == 0) return 1;
    if (marvv_scenario_load("/nonexistent/scenario.json", &missing) != MARVV_ERR_IO) return 1;
    printf("marvv %s: %s\n", marvv_version(), marvv_last_error());
    marvv_scenario_free(s);
    return 0;
}
