"""
测试包
Test package

包含多项式核心、SOS 证书、锥求解器、对偶构造、预言机与命令行流水线的单元测试
"""
