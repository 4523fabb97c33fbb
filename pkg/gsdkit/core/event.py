"""
Event type strings used in gsdkit.
"""

EVENT_LOG = "eLog"
EVENT_STAGE = "eStage"
