"""Statevector simulation of comparing two distant magnetic field directions
with shared singlets, under quantum communication or LOCC.

Modules: ``qcore`` (states, gates, measurement), ``fields`` (promises and field
application), ``protocol`` (Bell discrimination and the quantum-channel
strategy), ``locc`` (party-restricted lab, remote CNOT, transcripts),
``analysis`` (uniqueness, finite-probe and sweep diagnostics), ``cli``.
"""
