"""Runtime configuration toggles.

Values here select between equally valid conventions; every toggle pairing is
validated by the oracle test suites, so flipping them changes which expression
is produced, never whether it is correct.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # Membership policy when a height lies in both T and T' (only possible for
    # p=1 or p=p'-1): "T" treats it as a T member, "Tprime" as a T' member,
    # None raises AmbiguousMembership.
    membership: str | None = "T"
    # Same policy for the truncated sets (only possible for p=2, value 1).
    membership_tilde: str | None = "T"
    # Index assigned to the length-1 truncated Takahashi value: the stated
    # t1+1, or t1 for compatibility with older conventions.
    sigma_tilde_start: str = "t1plus1"
    # Brute-force path enumeration cap on L.
    gen_fn_cap: int = 18
    # Worker count for corpus verification (None = cpu count).
    jobs: int | None = None

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


DEFAULT = Config()
