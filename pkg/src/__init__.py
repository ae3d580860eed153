"""
SOS-凸极小极大对偶实验包
SOS-convex minimax duality lab

SOS-凸性判定、对偶 SDP/LP 构造、内点锥求解器与原问题预言机，
用于验证 SOS-凸极小极大、鲁棒与分式规划的零对偶间隙。
"""

__version__ = "0.3.0"
