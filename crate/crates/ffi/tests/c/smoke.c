#include <stdio.h>
#include "psets.h"

int main(void) {
    PsetsPointSet *set = NULL;
    if (psets_pointset_new(PSETS_FAMILY_PSET, 2, 13, 0, NULL, NULL, NULL, NULL, &set) != PSETS_STATUS_OK)
        return 1;
    bool passed = false;
    if (psets_verify_weil(set, 0, &passed, NULL) != PSETS_STATUS_OK || !passed)
        return 2;
    if (psets_pointset_new(PSETS_FAMILY_PSET, 2, 9, 0, NULL, NULL, NULL, NULL, &set) != PSETS_STATUS_NOT_PRIME)
        return 3;
    printf("%zu %s\n", psets_pointset_len(set), psets_last_error());
    psets_pointset_free(set);
    return 0;
}
