"""Optional per-step diagnostic exports: firm state and market transactions."""

from __future__ import annotations

from pathlib import Path

FIRM_HEADER = "step,firm,sector,price,supply,workers,cash"
TRANSACTION_HEADER = "step,market,buyer,seller,units,price"


class DiagnosticsSink:
    """Appends one firm row per active firm per step and one row per market
    transaction. Files live under ``directory`` as firms.csv/transactions.csv."""

    def __init__(self, directory: str | Path):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self._firms = open(directory / "firms.csv", "w")
        self._firms.write(FIRM_HEADER + "\n")
        self._transactions = open(directory / "transactions.csv", "w")
        self._transactions.write(TRANSACTION_HEADER + "\n")

    def after_step(self, world, scratch, step: int) -> None:
        for f in world.active_firms():
            self._firms.write(
                f"{step},{f.id},{f.sector.value},{f.price},{f.supply},"
                f"{len(f.employees)},{f.cash}\n"
            )
        for market, tx in scratch.transactions:
            self._transactions.write(
                f"{step},{market},{tx.buyer},{tx.seller},{tx.units},{tx.price}\n"
            )
        self._firms.flush()
        self._transactions.flush()

    def close(self) -> None:
        self._firms.close()
        self._transactions.close()
